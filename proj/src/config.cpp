#include "martlab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "martlab/grid.hpp"

namespace martlab {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  double x = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw ConfigError("key '" + key + "' wants a number, got '" + v + "'");
  return x;
}

long long parse_ll(const std::string& key, const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  long long x = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0')
    throw ConfigError("key '" + key + "' wants an integer, got '" + v + "'");
  return x;
}

}  // namespace

std::string Config::get_str(const std::string& key,
                            const std::string& def) const {
  auto it = kv.find(key);
  return it == kv.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
  auto it = kv.find(key);
  return it == kv.end() ? def : parse_double(key, it->second);
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  const char* s = it->second.c_str();
  char* end = nullptr;
  auto x = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0')
    throw ConfigError("key '" + key + "' wants an unsigned integer, got '" +
                      it->second + "'");
  return x;
}

std::size_t Config::get_size(const std::string& key, std::size_t def) const {
  return static_cast<std::size_t>(get_u64(key, def));
}

int Config::get_int(const std::string& key, int def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  long long x = parse_ll(key, it->second);
  return static_cast<int>(x);
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "' wants a boolean, got '" + v + "'");
}

std::vector<int> Config::get_levels(const std::string& key,
                                    const std::string& def) const {
  std::string v = get_str(key, def);
  std::vector<int> out;
  auto dots = v.find("..");
  if (dots != std::string::npos) {
    int a = static_cast<int>(parse_ll(key, trim(v.substr(0, dots))));
    int b = static_cast<int>(parse_ll(key, trim(v.substr(dots + 2))));
    if (a > b) throw ConfigError("key '" + key + "': empty range " + v);
    for (int n = a; n <= b; ++n) out.push_back(n);
  } else {
    std::size_t pos = 0;
    while (pos <= v.size()) {
      auto comma = v.find(',', pos);
      std::string tok = trim(v.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (!tok.empty()) out.push_back(static_cast<int>(parse_ll(key, tok)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': no levels in " + v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int n : out)
    if (n < 1 || n > kMaxGridLevel)
      throw ConfigError("key '" + key + "': level " + std::to_string(n) +
                        " outside 1.." + std::to_string(kMaxGridLevel));
  return out;
}

std::vector<std::string> Config::get_list(const std::string& key,
                                          const std::string& def) const {
  std::string v = get_str(key, def);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    std::string tok = trim(v.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (!tok.empty()) out.push_back(tok);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

Config load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    cfg.set(key, value);
  }
  return cfg;
}

Config parse_cli_config(const std::vector<std::string>& args) {
  // collect flag pairs first so --config applies before the overrides
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.size() < 3 || a[0] != '-' || a[1] != '-')
      throw ConfigError("expected --key=value or --key value, got '" + a +
                        "'");
    std::string body = a.substr(2);
    auto eq = body.find('=');
    if (eq != std::string::npos) {
      pairs.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= args.size())
        throw ConfigError("flag --" + body + " is missing its value");
      pairs.emplace_back(body, args[++i]);
    }
  }
  Config cfg;
  for (const auto& [k, v] : pairs)
    if (k == "config") cfg = load_config_file(v);
  for (const auto& [k, v] : pairs) {
    if (k == "config") continue;
    if (k.empty()) throw ConfigError("empty flag name");
    cfg.set(k, v);
  }
  return cfg;
}

ModelDescriptor model_from_config(const Config& cfg,
                                  const std::string& prefix) {
  std::string kind = cfg.get_str(prefix + "kind", "bm");
  try {
    if (kind == "bm")
      return ModelDescriptor::brownian(cfg.get_double(prefix + "mu", 0.0),
                                       cfg.get_double(prefix + "sigma", 1.0));
    if (kind == "fbm")
      return ModelDescriptor::fractional_brownian(
          cfg.get_double(prefix + "hurst", 0.75));
    if (kind == "cpois")
      return ModelDescriptor::compensated_poisson(
          cfg.get_double(prefix + "rate", 1.0));
    if (kind == "squared-bm") return ModelDescriptor::squared_brownian();
    if (kind == "ou")
      return ModelDescriptor::ornstein_uhlenbeck(
          cfg.get_double(prefix + "theta", 1.0),
          cfg.get_double(prefix + "sigma", 1.0));
    if (kind == "deterministic")
      return ModelDescriptor::deterministic(
          cfg.get_str(prefix + "func", "linear"));
    if (kind == "truncated")
      return ModelDescriptor::truncated(
          model_from_config(cfg, prefix + "inner."),
          cfg.get_double(prefix + "bound", 1.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid model parameters: ") + e.what());
  }
  throw ConfigError("unknown " + prefix + "kind: " + kind);
}

}  // namespace martlab
