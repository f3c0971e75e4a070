#ifndef MARTLAB_CONFIG_HPP
#define MARTLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "martlab/model.hpp"

namespace martlab {

// invalid configuration (bad key value, malformed flag, unreadable file);
// the CLI maps this to exit code 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat dotted-key configuration: `key = value` lines with '#' comments,
// overridable by --key=value / --key value flags. Later sources win.
struct Config {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  void set(const std::string& key, const std::string& value) {
    kv[key] = value;
  }

  std::string get_str(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  std::size_t get_size(const std::string& key, std::size_t def) const;
  int get_int(const std::string& key, int def) const;
  bool get_bool(const std::string& key, bool def) const;
  // "4..12" (inclusive range) or "4,6,8"; sorted, deduplicated
  std::vector<int> get_levels(const std::string& key,
                              const std::string& def) const;
  // comma-separated list
  std::vector<std::string> get_list(const std::string& key,
                                    const std::string& def) const;
};

Config load_config_file(const std::string& path);

// args after the subcommand; a --config flag is loaded first, then the
// remaining flags are applied on top
Config parse_cli_config(const std::vector<std::string>& args);

// builds the model from <prefix>kind and friends; truncation recurses into
// <prefix>inner.*
ModelDescriptor model_from_config(const Config& cfg,
                                  const std::string& prefix = "model.");

}  // namespace martlab

#endif
