#include "martlab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace martlab::io {

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

// json dumps with a stable key order so repeated runs emit identical bytes
std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

nlohmann::ordered_json ordered(const nlohmann::json& j) {
  return nlohmann::ordered_json::parse(j.dump());
}

std::string value_header(const char* prefix, std::size_t count) {
  std::string h = "path";
  for (std::size_t i = 0; i < count; ++i) {
    h += ',';
    h += prefix;
    h += std::to_string(i);
  }
  h += '\n';
  return h;
}

void write_value_rows(std::ofstream& f, const std::string& header,
                      std::size_t n_rows, std::size_t n_cols,
                      const double* data) {
  f << header;
  std::string line;
  for (std::size_t p = 0; p < n_rows; ++p) {
    line.clear();
    line += std::to_string(p);
    const double* row = data + p * n_cols;
    for (std::size_t i = 0; i < n_cols; ++i) {
      line += ',';
      append_double(line, row[i]);
    }
    line += '\n';
    f << line;
  }
}

}  // namespace

std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

void write_text_file(const std::string& path, const std::string& contents) {
  auto f = open_out(path);
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_ensemble_csv(const std::string& file, const PathEnsemble& S) {
  auto f = open_out(file);
  write_value_rows(f, value_header("t_", S.cols()), S.n_paths, S.cols(),
                   S.data.data());
}

void write_ensemble_sidecar(const std::string& file, const PathEnsemble& S) {
  nlohmann::ordered_json j;
  j["model"] = ordered(S.model.to_json());
  j["seed"] = S.seed;
  j["grid_level"] = S.grid.level;
  j["n_paths"] = S.n_paths;
  j["synthesis_method"] = S.synthesis;
  write_text_file(file, dump(j));
}

ModelDescriptor model_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bm")
    return ModelDescriptor::brownian(j.at("mu").get<double>(),
                                     j.at("sigma").get<double>());
  if (kind == "fbm")
    return ModelDescriptor::fractional_brownian(j.at("hurst").get<double>());
  if (kind == "cpois")
    return ModelDescriptor::compensated_poisson(j.at("rate").get<double>());
  if (kind == "squared-bm") return ModelDescriptor::squared_brownian();
  if (kind == "ou")
    return ModelDescriptor::ornstein_uhlenbeck(j.at("theta").get<double>(),
                                               j.at("sigma").get<double>());
  if (kind == "deterministic")
    return ModelDescriptor::deterministic(j.at("func").get<std::string>());
  if (kind == "truncated")
    return ModelDescriptor::truncated(model_from_json(j.at("inner")),
                                      j.at("bound").get<double>());
  // a stopped model's stopping data lives in its own file; reading the
  // sidecar alone yields an opaque descriptor
  if (kind == "stopped") return ModelDescriptor::derived("stopped");
  if (kind == "derived")
    return ModelDescriptor::derived(j.at("note").get<std::string>());
  throw std::invalid_argument("unknown model kind in sidecar: " + kind);
}

PathEnsemble read_ensemble_csv(const std::string& csv_file,
                               const std::string& sidecar_file) {
  auto meta = nlohmann::json::parse(read_text_file(sidecar_file));
  PathEnsemble S;
  S.grid = make_grid(meta.at("grid_level").get<int>());
  S.n_paths = meta.at("n_paths").get<std::size_t>();
  S.seed = meta.at("seed").get<std::uint64_t>();
  S.synthesis = meta.at("synthesis_method").get<std::string>();
  S.model = model_from_json(meta.at("model"));
  S.data.assign(S.n_paths * S.cols(), 0.0);

  std::ifstream f(csv_file, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + csv_file);
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error("empty ensemble csv: " + csv_file);
  std::size_t rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (rows >= S.n_paths)
      throw std::runtime_error("more csv rows than sidecar n_paths");
    const char* s = line.c_str();
    char* end = nullptr;
    auto p = std::strtoull(s, &end, 10);
    if (end == s || *end != ',')
      throw std::runtime_error("malformed csv row in " + csv_file);
    if (p != rows) throw std::runtime_error("csv rows out of order");
    double* row = S.data.data() + rows * S.cols();
    for (std::size_t i = 0; i < S.cols(); ++i) {
      // end sits on the separator before this field; a row that ends early
      // must not be stepped past its terminator
      if (*end == '\0' || *end == '\r')
        throw std::runtime_error("short csv row in " + csv_file);
      s = end + 1;
      row[i] = std::strtod(s, &end);
      if (end == s) throw std::runtime_error("short csv row in " + csv_file);
    }
    if (*end != '\0' && *end != '\r')
      throw std::runtime_error("trailing csv fields in " + csv_file);
    ++rows;
  }
  if (rows != S.n_paths)
    throw std::runtime_error("fewer csv rows than sidecar n_paths");
  S.check_shape();
  return S;
}

void write_integrand_csv(const std::string& file,
                         const ElementaryIntegrand& h) {
  auto f = open_out(file);
  write_value_rows(f, value_header("t_", h.cells()), h.n_paths, h.cells(),
                   h.coeff.data());
}

void write_integrand_sidecar(const std::string& file,
                             const ElementaryIntegrand& h,
                             const std::string& kind) {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["lag"] = h.lag == CoeffLag::LagZero ? 0 : 1;
  j["bound"] = h.declared_bound;
  j["level"] = h.level;
  j["n_paths"] = h.n_paths;
  write_text_file(file, dump(j));
}

void write_stopping_csv(const std::string& file,
                        const StoppingTimeVector& rho) {
  auto f = open_out(file);
  f << "path,index,time\n";
  std::string line;
  for (std::size_t p = 0; p < rho.n_paths(); ++p) {
    line.clear();
    line += std::to_string(p);
    line += ',';
    if (rho.is_inf(p)) {
      line += "inf,inf";
    } else {
      line += std::to_string(rho.idx[p]);
      line += ',';
      append_double(line, rho.time(p));
    }
    line += '\n';
    f << line;
  }
}

void write_mean_variation_csv(const std::string& file,
                              const MeanVariationReport& rep) {
  auto f = open_out(file);
  f << "level,estimate,stderr,oracle,stopped\n";
  std::string line;
  for (const auto& e : rep.entries) {
    line.clear();
    line += std::to_string(e.level);
    line += ',';
    append_double(line, e.estimate);
    line += ',';
    append_double(line, e.stderr_value);
    line += ',';
    line += e.oracle;
    line += ',';
    line += e.stopped ? "true" : "false";
    line += '\n';
    f << line;
  }
}

void write_mean_variation_json(const std::string& file,
                               const MeanVariationReport& rep) {
  nlohmann::ordered_json j;
  j["model"] = rep.model;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : rep.entries) {
    nlohmann::ordered_json row;
    row["level"] = e.level;
    row["estimate"] = e.estimate;
    row["stderr"] = e.stderr_value;
    row["oracle"] = e.oracle;
    row["stopped"] = e.stopped;
    j["entries"].push_back(row);
  }
  j["tail_delta"] = rep.tail_delta;
  j["tail_delta_se"] = rep.tail_delta_se;
  write_text_file(file, dump(j));
}

void write_decomposition_csv(const std::string& file, const PathEnsemble& a,
                             const PathEnsemble& b,
                             const std::string& label_a,
                             const std::string& label_b) {
  if (a.n_paths != b.n_paths || a.grid.level != b.grid.level)
    throw std::invalid_argument("decomposition components disagree in shape");
  auto f = open_out(file);
  std::string h = "path,component";
  for (std::size_t i = 0; i < a.cols(); ++i) {
    h += ",t_";
    h += std::to_string(i);
  }
  h += '\n';
  f << h;
  std::string line;
  for (std::size_t p = 0; p < a.n_paths; ++p) {
    for (int half = 0; half < 2; ++half) {
      const PathEnsemble& e = half == 0 ? a : b;
      line.clear();
      line += std::to_string(p);
      line += ',';
      line += half == 0 ? label_a : label_b;
      auto row = e.path(p);
      for (std::size_t i = 0; i < e.cols(); ++i) {
        line += ',';
        append_double(line, row[i]);
      }
      line += '\n';
      f << line;
    }
  }
}

void write_probe_json(const std::string& file, const ProbeReport& rep) {
  nlohmann::ordered_json j;
  j["verdict"] = rep.verdict;
  j["levels"] = nlohmann::ordered_json::array();
  for (const auto& row : rep.levels) {
    nlohmann::ordered_json r;
    r["n"] = row.level;
    r["C"] = row.c_eps;
    r["stderr"] = row.se;
    j["levels"].push_back(r);
  }
  j["exponent"] = rep.exponent;
  j["fit"] = rep.fit_r2;
  j["epsilon"] = rep.epsilon;
  j["family"] = rep.family;
  j["model"] = rep.model;
  write_text_file(file, dump(j));
}

void write_probe_csv(const std::string& file, const ProbeReport& rep) {
  auto f = open_out(file);
  f << "level,quantity,value,stderr\n";
  std::string line;
  for (const auto& row : rep.levels) {
    line.clear();
    line += std::to_string(row.level);
    line += ",C,";
    append_double(line, row.c_eps);
    line += ',';
    append_double(line, row.se);
    line += '\n';
    f << line;
  }
}

void write_riemann_json(const std::string& file, const RiemannReport& rep) {
  nlohmann::ordered_json j;
  j["verdict"] = rep.verdict;
  j["integrands"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < rep.integrands.size(); ++k) {
    const auto& cr = rep.reports[k];
    nlohmann::ordered_json r;
    r["name"] = rep.integrands[k];
    r["verdict"] = cr.verdict;
    r["levels"] = cr.levels;
    r["distances"] = cr.dist;
    r["tau_conv"] = cr.tau_conv;
    r["tau_div"] = cr.tau_div;
    j["integrands"].push_back(r);
  }
  write_text_file(file, dump(j));
}

void write_riemann_csv(const std::string& file, const RiemannReport& rep) {
  auto f = open_out(file);
  f << "level,quantity,value,stderr\n";
  std::string line;
  for (std::size_t k = 0; k < rep.integrands.size(); ++k) {
    const auto& cr = rep.reports[k];
    for (std::size_t i = 0; i + 1 < cr.levels.size(); ++i) {
      line.clear();
      line += std::to_string(cr.levels[i]);
      line += ",kyfan-next:";
      line += rep.integrands[k];
      line += ',';
      append_double(line, cr.at(i, i + 1));
      line += ",0\n";
      f << line;
    }
  }
}

void write_pipeline_json(const std::string& file, const PipelineReport& rep) {
  nlohmann::ordered_json j;
  j["verdict"] = rep.pass ? "PASS" : "FAIL";
  j["model"] = rep.model;
  j["epsilon"] = rep.epsilon;
  j["sup_bound"] = rep.sup_bound;
  j["c_quantile"] = rep.c_quantile;
  j["c_constant"] = rep.c_constant;
  j["family"] = rep.family;
  j["levels"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    nlohmann::ordered_json row;
    row["n"] = r.level;
    row["C"] = r.c_eps;
    row["C_stderr"] = r.c_se;
    row["frac_inf"] = r.frac_inf;
    row["frac_stderr"] = r.frac_se;
    row["terminal_mean"] = r.terminal_mean;
    row["max_terminal"] = r.max_terminal;
    row["var_stopped"] = r.var_stopped;
    row["var_stderr"] = r.var_se;
    row["identity_gap"] = r.identity_gap;
    row["identity_stderr"] = r.identity_se;
    row["var_acc"] = rep.var_acc[i];
    row["var_acc_stderr"] = rep.var_acc_se[i];
    row["pass_frac"] = r.pass_frac;
    row["pass_var"] = r.pass_var;
    row["pass_terminal"] = r.pass_terminal;
    row["pass_identity"] = r.pass_identity;
    row["pass_var_acc"] = static_cast<bool>(rep.pass_var_acc[i]);
    j["levels"].push_back(row);
  }
  j["frac_acc_inf"] = rep.frac_acc_inf;
  j["frac_acc_stderr"] = rep.frac_acc_se;
  j["pass_acc"] = rep.pass_acc;
  j["mazur_max_gap"] = rep.mazur.max_gap;
  write_text_file(file, dump(j));
}

void write_pipeline_csv(const std::string& file, const PipelineReport& rep) {
  auto f = open_out(file);
  f << "level,quantity,value,stderr\n";
  std::string line;
  auto emit = [&](int level, const char* q, double v, double se) {
    line.clear();
    line += std::to_string(level);
    line += ',';
    line += q;
    line += ',';
    append_double(line, v);
    line += ',';
    append_double(line, se);
    line += '\n';
    f << line;
  };
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    emit(r.level, "C", r.c_eps, r.c_se);
    emit(r.level, "frac_inf", r.frac_inf, r.frac_se);
    emit(r.level, "terminal_mean", r.terminal_mean, 0.0);
    emit(r.level, "max_terminal", r.max_terminal, 0.0);
    emit(r.level, "var_stopped", r.var_stopped, r.var_se);
    emit(r.level, "var_acc", rep.var_acc[i], rep.var_acc_se[i]);
  }
}

void write_mazur_json(const std::string& file, const MazurResult& res) {
  nlohmann::ordered_json j;
  j["window"] = res.window;
  j["max_gap"] = res.max_gap;
  j["windows"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.windows.size(); ++i) {
    nlohmann::ordered_json w;
    w["first"] = res.windows[i].first;
    w["last"] = res.windows[i].last;
    w["weights"] = res.windows[i].weights;
    w["combo_norm"] = res.combo_norm[i];
    j["windows"].push_back(w);
  }
  write_text_file(file, dump(j));
}

void write_failures_json(
    const std::string& file,
    const std::vector<std::pair<std::string, std::string>>& failures) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& [check, detail] : failures) {
    nlohmann::ordered_json r;
    r["check"] = check;
    r["detail"] = detail;
    j.push_back(r);
  }
  write_text_file(file, dump(j));
}

}  // namespace martlab::io
