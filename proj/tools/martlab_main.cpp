#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "martlab/config.hpp"
#include "martlab/drift.hpp"
#include "martlab/io.hpp"
#include "martlab/limits.hpp"
#include "martlab/rng.hpp"
#include "martlab/simulate.hpp"
#include "martlab/variation.hpp"

namespace {

using namespace martlab;

const char* kUsage =
    "usage: martlab <command> [--key value | --key=value]...\n"
    "commands:\n"
    "  simulate        draw an ensemble and write it out\n"
    "  mean-variation  mean variation across grid levels\n"
    "  decompose       Doob or Rao decomposition of the ensemble\n"
    "  probe           boundedness probe of the integration map\n"
    "  riemann         Riemann-sum convergence test\n"
    "  theorem1        trigger/crossing/accumulation pipeline with bounds\n"
    "  mazur-demo      min-norm combinations of random indicators\n"
    "common keys: config, seed, levels, paths, epsilon, out, format,\n"
    "             threads, model.kind (bm|fbm|cpois|squared-bm|ou|\n"
    "             deterministic|truncated), model.* parameters\n";

struct Emit {
  std::filesystem::path dir;
  bool csv = true;
  bool json = true;
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

Emit make_emit(const Config& cfg) {
  Emit e;
  e.dir = cfg.get_str("out", "out");
  std::string fmt = cfg.get_str("format", "both");
  if (fmt == "csv") {
    e.json = false;
  } else if (fmt == "json") {
    e.csv = false;
  } else if (fmt != "both") {
    throw ConfigError("format must be csv, json, or both");
  }
  std::error_code ec;
  std::filesystem::create_directories(e.dir, ec);
  if (ec && !std::filesystem::is_directory(e.dir))
    throw ConfigError("cannot create output directory: " + e.dir.string());
  return e;
}

void apply_threads(const Config& cfg) {
  int t = cfg.get_int("threads", 0);
#ifdef _OPENMP
  if (t > 0) omp_set_num_threads(t);
#else
  (void)t;
#endif
}

std::vector<int> levels_from(const Config& cfg) {
  return cfg.get_levels("levels", "4..12");
}

SimulateOptions sim_options(const Config& cfg) {
  SimulateOptions opt;
  std::string m = cfg.get_str("fbm.method", "auto");
  if (m == "auto")
    opt.fbm_method = SimulateOptions::FbmMethod::Auto;
  else if (m == "circulant")
    opt.fbm_method = SimulateOptions::FbmMethod::Circulant;
  else if (m == "cholesky")
    opt.fbm_method = SimulateOptions::FbmMethod::Cholesky;
  else
    throw ConfigError("fbm.method must be auto, circulant, or cholesky");
  return opt;
}

PathEnsemble simulate_from(const Config& cfg, const std::vector<int>& levels,
                           std::size_t min_paths = 1) {
  auto n_paths = cfg.get_size("paths", 10000);
  if (n_paths < min_paths)
    throw ConfigError("this command needs paths >= " +
                      std::to_string(min_paths));
  int fine = *std::max_element(levels.begin(), levels.end());
  ModelDescriptor model = model_from_config(cfg);
  try {
    return simulate(model, fine, n_paths, cfg.get_u64("seed", 1),
                    sim_options(cfg));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("cannot simulate this model: ") + e.what());
  } catch (const std::length_error& e) {
    throw ConfigError(std::string("grid too fine: ") + e.what());
  }
}

DriftOracle oracle_from(const Config& cfg, const ModelDescriptor& model) {
  std::string o = cfg.get_str("oracle", "exact");
  if (o == "exact") {
    if (!model.has_exact_drift_oracle())
      throw ConfigError("no exact drift oracle for model " + model.label() +
                        "; use oracle = kernel");
    return DriftOracle::exact_for(model);
  }
  if (o == "kernel")
    return DriftOracle::kernel(cfg.get_double("kernel.bandwidth", 0.0));
  throw ConfigError("oracle must be exact or kernel");
}

using Failures = std::vector<std::pair<std::string, std::string>>;

int cmd_simulate(const Config& cfg) {
  Emit emit = make_emit(cfg);
  PathEnsemble S = simulate_from(cfg, levels_from(cfg));
  io::write_ensemble_csv(emit.file("ensemble.csv"), S);
  io::write_ensemble_sidecar(emit.file("ensemble.json"), S);
  std::cout << "wrote " << S.n_paths << " paths on level " << S.grid.level
            << " (" << S.synthesis << ")\n";
  return 0;
}

int cmd_mean_variation(const Config& cfg) {
  Emit emit = make_emit(cfg);
  auto levels = levels_from(cfg);
  PathEnsemble S = simulate_from(cfg, levels);
  DriftOracle oracle = oracle_from(cfg, S.model);
  DriftCache cache;
  MeanVariationReport rep = mean_variation_levels(S, oracle, levels, &cache);
  if (emit.csv) io::write_mean_variation_csv(emit.file("mean_variation.csv"), rep);
  if (emit.json)
    io::write_mean_variation_json(emit.file("mean_variation.json"), rep);
  for (const auto& e : rep.entries)
    std::cout << "level " << e.level << "  var " << io::format_double(e.estimate)
              << "  se " << io::format_double(e.stderr_value) << "\n";
  return 0;
}

int cmd_decompose(const Config& cfg) {
  Emit emit = make_emit(cfg);
  auto levels = levels_from(cfg);
  PathEnsemble S = simulate_from(cfg, levels);
  DriftOracle oracle = oracle_from(cfg, S.model);
  std::string kind = cfg.get_str("decompose.kind", "doob");
  Failures failures;
  double err = 0.0;
  if (kind == "doob") {
    DoobDecomposition dec = doob_decompose(S, oracle);
    err = dec.max_recon_err;
    io::write_decomposition_csv(emit.file("decomposition.csv"),
                                dec.martingale, dec.compensator, "M", "A");
  } else if (kind == "rao") {
    RaoDecomposition dec = rao_decompose(S, oracle);
    err = dec.max_recon_err;
    io::write_decomposition_csv(emit.file("decomposition.csv"), dec.y, dec.z,
                                "Y", "Z");
  } else {
    throw ConfigError("decompose.kind must be doob or rao");
  }
  if (!(err <= 1e-9))
    failures.emplace_back("reconstruction",
                          "max |sum - S| = " + io::format_double(err));
  std::cout << kind << " reconstruction error " << io::format_double(err)
            << "\n";
  if (!failures.empty()) {
    io::write_failures_json(emit.file("failures.json"), failures);
    for (const auto& [c, d] : failures)
      std::cerr << "FAIL " << c << ": " << d << "\n";
    return 1;
  }
  return 0;
}

int cmd_probe(const Config& cfg) {
  Emit emit = make_emit(cfg);
  auto levels = levels_from(cfg);
  PathEnsemble S = simulate_from(cfg, levels, 100);
  auto family = cfg.get_list("probe.family",
                             "lagged-sign-1,lagged-sign-2,random-sign");
  DriftCache cache;
  ProbeReport rep = good_integrator_probe(
      S, levels, cfg.get_double("epsilon", 0.1), family,
      cfg.get_u64("probe.seed", 0x5851f42d4c957f2dULL), ProbeThresholds{},
      &cache);
  if (emit.json) io::write_probe_json(emit.file("probe.json"), rep);
  if (emit.csv) io::write_probe_csv(emit.file("probe.csv"), rep);
  std::cout << "verdict " << rep.verdict << "  exponent "
            << io::format_double(rep.exponent) << "  fit "
            << io::format_double(rep.fit_r2) << "\n";
  return 0;
}

TabulatedProcess riemann_member(const std::string& name) {
  if (name == "constant") return k_constant(1.0);
  if (name == "identity") return k_identity();
  if (name == "exp-neg-sq") return k_exp_neg_sq();
  if (name == "time") return k_time();
  if (name == "interp-lagged-sign") return k_interp_lagged_sign();
  throw ConfigError("unknown riemann.family member: " + name);
}

int cmd_riemann(const Config& cfg) {
  Emit emit = make_emit(cfg);
  auto levels = levels_from(cfg);
  PathEnsemble S = simulate_from(cfg, levels, 100);
  std::vector<TabulatedProcess> ks;
  for (const auto& name :
       cfg.get_list("riemann.family", "constant,identity,exp-neg-sq"))
    ks.push_back(riemann_member(name));
  ConvergenceThresholds thr;
  thr.tau_conv = cfg.get_double("riemann.tau_conv", thr.tau_conv);
  thr.tau_div = cfg.get_double("riemann.tau_div", thr.tau_div);
  RiemannReport rep = riemann_integrator_test(S, ks, levels, thr);
  if (emit.json) io::write_riemann_json(emit.file("riemann.json"), rep);
  if (emit.csv) io::write_riemann_csv(emit.file("riemann.csv"), rep);
  std::cout << "riemann integrator: " << rep.verdict << "\n";
  for (std::size_t k = 0; k < rep.integrands.size(); ++k)
    std::cout << "  " << rep.integrands[k] << ": " << rep.reports[k].verdict
              << "\n";
  return 0;
}

int cmd_theorem1(const Config& cfg) {
  Emit emit = make_emit(cfg);
  PipelineOptions opt;
  opt.levels = levels_from(cfg);
  opt.epsilon = cfg.get_double("epsilon", 0.1);
  opt.window = cfg.get_size("mazur.window", 8);
  opt.probe_seed = cfg.get_u64("probe.seed", opt.probe_seed);
  if (cfg.has("pipeline.family"))
    opt.family = cfg.get_list("pipeline.family", "");
  PathEnsemble S = simulate_from(cfg, opt.levels, 100);
  PipelineReport rep;
  try {
    rep = theorem1_pipeline(S, opt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pipeline rejected the setup: ") + e.what());
  }
  if (emit.json) io::write_pipeline_json(emit.file("theorem1.json"), rep);
  if (emit.csv) io::write_pipeline_csv(emit.file("theorem1.csv"), rep);

  Failures failures;
  auto flag = [&](bool ok, const std::string& check, int level, double value,
                  double bound) {
    if (ok) return;
    failures.emplace_back(
        check, "level " + std::to_string(level) + ": " +
                   io::format_double(value) + " vs bound " +
                   io::format_double(bound));
  };
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    flag(r.pass_frac, "frac{crossing never fires} >= 1 - eps - 3se", r.level,
         r.frac_inf, 1.0 - rep.epsilon);
    flag(r.pass_terminal, "stopped terminal <= C + 2b", r.level,
         r.max_terminal, r.c_eps + 2.0 * rep.sup_bound);
    flag(r.pass_var, "stopped variation <= c_constant", r.level,
         r.var_stopped, rep.c_constant);
    flag(r.pass_identity, "terminal mean = gated variation", r.level,
         r.identity_gap, 3.0 * r.identity_se);
    flag(rep.pass_var_acc[i], "accumulated variation <= 2C + 6b", r.level,
         rep.var_acc[i], 2.0 * rep.c_constant + 6.0 * rep.sup_bound);
  }
  if (!rep.pass_acc)
    failures.emplace_back("frac{accumulated time = inf} >= 1 - 3eps - 3se",
                          io::format_double(rep.frac_acc_inf) + " vs " +
                              io::format_double(1.0 - 3.0 * rep.epsilon));

  std::cout << "theorem1: " << (rep.pass ? "PASS" : "FAIL") << "  C = "
            << io::format_double(rep.c_quantile)
            << "  frac_acc = " << io::format_double(rep.frac_acc_inf) << "\n";
  if (!failures.empty()) {
    io::write_failures_json(emit.file("failures.json"), failures);
    for (const auto& [c, d] : failures)
      std::cerr << "FAIL " << c << ": " << d << "\n";
    return 1;
  }
  return 0;
}

int cmd_mazur_demo(const Config& cfg) {
  Emit emit = make_emit(cfg);
  auto count = cfg.get_size("mazur.count", 12);
  auto n_paths = cfg.get_size("paths", 10000);
  double p = cfg.get_double("mazur.p", 0.5);
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError("mazur.p must lie in [0, 1]");
  if (count == 0) throw ConfigError("mazur.count must be positive");
  auto seed = cfg.get_u64("seed", 1);
  // i.i.d. indicator vectors with mean p: the min-norm combinations should
  // contract toward the constant-p vector as the window grows
  std::vector<std::vector<double>> xs(count, std::vector<double>(n_paths));
  for (std::size_t k = 0; k < count; ++k) {
    Rng g(seed, mix64(k + 1));
    for (std::size_t i = 0; i < n_paths; ++i)
      xs[k][i] = g.next_unit() <= p ? 1.0 : 0.0;
  }
  MazurResult res = mazur_sequence(xs, cfg.get_size("mazur.window", 8));
  io::write_mazur_json(emit.file("mazur.json"), res);
  std::cout << "windows " << res.windows.size() << "  first norm "
            << io::format_double(res.combo_norm.front()) << "  max gap "
            << io::format_double(res.max_gap) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  std::string command = argv[1];
  std::vector<std::string> args(argv + 2, argv + argc);
  try {
    Config cfg = parse_cli_config(args);
    apply_threads(cfg);
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "mean-variation") return cmd_mean_variation(cfg);
    if (command == "decompose") return cmd_decompose(cfg);
    if (command == "probe") return cmd_probe(cfg);
    if (command == "riemann") return cmd_riemann(cfg);
    if (command == "theorem1") return cmd_theorem1(cfg);
    if (command == "mazur-demo") return cmd_mazur_demo(cfg);
    std::cerr << "unknown command: " << command << "\n" << kUsage;
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
