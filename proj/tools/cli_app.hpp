#pragma once

// Command implementations behind the meshmdp CLI.  Each command reads a
// resolved Config, writes its artifacts plus manifest.json into the output
// directory and returns a process exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meshmdp/meshmdp.hpp"

#ifndef MESHMDP_VERSION
#define MESHMDP_VERSION "0.0.0"
#endif

namespace meshmdp::app {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kSelfTestFailure = 4 };

inline std::vector<ConfigKey> schema() {
  return {
      {"problem.type", "lqg", "lqg | constant"},
      {"problem.config_id", "lqg", "identifier written to every CSV row"},

      {"lqg.dim", "1", "state and action dimension d"},
      {"lqg.lambda", "1", "risk-sensitivity parameter"},
      {"lqg.T", "0.2", "time horizon"},
      {"lqg.delta", "0.01", "time step; H = round(T / delta)"},
      {"lqg.action_halfwidth", "1", "half-width of the sampled action box"},
      {"lqg.action_units", "rate", "rate (box on the control rate) | increment (box on the state increment)"},
      {"lqg.n_actions", "50", "actions per sampled set, zero action included"},
      {"lqg.terminal_sign", "minus", "plus | minus: F(x) = +-log((1 + |x|^2) / 2)"},
      {"lqg.noise_variance_factor", "2", "per-step variance = factor * delta"},
      {"lqg.x0", "", "start state, comma separated; empty = origin"},

      {"constant.value", "0", "terminal constant c"},
      {"constant.horizon", "1", "horizon H"},
      {"constant.sigma", "0.1", "Gaussian kernel standard deviation"},

      {"run.n_paths", "10,100,200,500", "mesh sizes N for lqg-table"},
      {"run.repetitions", "30", "independent solves per N"},
      {"run.base_seed", "1", "root of every derived seed"},
      {"run.reference_samples", "10000", "Monte Carlo samples for the closed-form reference"},
      {"run.workers", "1", "worker threads; 0 = hardware concurrency"},

      {"solve.n_paths", "500", "mesh size for solve"},
      {"solve.repetition", "0", "repetition index used for seed derivation"},
      {"solve.eval_paths", "0", "forward-simulation paths for policy evaluation; 0 = skip"},
      {"solve.write_mesh", "false", "also dump mesh.csv"},
      {"solve.gamma", "0.2", "schedule exponent for kernel diagnostics, in (0, 1/4)"},

      {"sweep.lambdas", "0.25,0.5,1,2,4", "lambda values for lqg-sweep"},

      {"oracle.method", "closed_form", "closed_form | grid_dp"},
      {"oracle.t", "0", "start time for the closed form"},
      {"oracle.n_actions", "201", "evenly spaced actions for grid_dp"},
      {"oracle.grid_halfwidth", "0", "0 = automatic"},
      {"oracle.grid_step", "0", "0 = sigma_min / 4"},
      {"oracle.quadrature_nodes", "64", "Gauss-Hermite nodes"},
      {"oracle.tolerance", "inf", "maximum accepted refinement error"},

      {"weights.sizes", "100,1000,10000", "mesh sizes for check-weights"},
      {"weights.replications", "20", "seeds per mesh size"},
      {"weights.x", "", "query state; empty = x0"},
      {"weights.a", "0", "query action"},
      {"weights.h", "1", "query step"},
      {"weights.function", "terminal", "terminal | one"},
      {"weights.mass_tolerance", "0.05", "accepted relative deviation of the weight mass at the largest N"},

      {"calibrate.candidates", "0.25,0.5,0.75,1,1.5,2", "lambda candidates"},
      {"calibrate.target", "", "reference value to match (required)"},

      {"self_test.min", "-inf", "lower bound on the checked statistic"},
      {"self_test.max", "inf", "upper bound on the checked statistic"},
      {"self_test.std_max", "inf", "upper bound on the repetition std (lqg-table)"},
  };
}

struct Options {
  std::string command;
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  std::optional<unsigned> workers;
  std::optional<std::string> method;
  bool self_test = false;
};

// Flat "section.key" -> value map from a manifest's resolved_config.
inline void load_manifest(Config& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, 0, "cannot open config file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, 0, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("resolved_config") || !j["resolved_config"].is_object())
    throw ConfigError(path, 0, 0, "manifest has no resolved_config object");
  for (const auto& [k, v] : j["resolved_config"].items()) {
    if (!v.is_string()) throw ConfigError(path, 0, 0, "resolved_config." + k + " must be a string");
    cfg.set(k, v.get<std::string>(), path);
  }
}

inline Config resolve_config(const Options& opt) {
  Config cfg(schema());
  if (opt.config_path) {
    const std::string& p = *opt.config_path;
    if (std::filesystem::path(p).extension() == ".json")
      load_manifest(cfg, p);
    else
      cfg.load_file(p);
  }
  cfg.apply_environment();
  for (const auto& s : opt.overrides) cfg.apply_override(s);
  if (opt.workers) cfg.set("run.workers", std::to_string(*opt.workers), "--workers");
  if (opt.method) cfg.set("oracle.method", *opt.method, "--method");
  return cfg;
}

inline unsigned workers_from(const Config& cfg) {
  const std::size_t w = cfg.get_size("run.workers");
  return w == 0 ? default_workers() : static_cast<unsigned>(w);
}

inline LqgConfig lqg_config_from(const Config& cfg) {
  LqgConfig c;
  c.config_id = cfg.get_string("problem.config_id");
  c.dim = cfg.get_size("lqg.dim");
  c.lambda = cfg.get_double("lqg.lambda");
  c.horizon_time = cfg.get_double("lqg.T");
  c.delta = cfg.get_double("lqg.delta");
  c.action_halfwidth = cfg.get_double("lqg.action_halfwidth");
  c.action_units = cfg.get_choice("lqg.action_units", {"rate", "increment"}) == "rate"
                       ? ActionUnits::rate
                       : ActionUnits::increment;
  c.n_actions = cfg.get_size("lqg.n_actions");
  c.terminal_sign = cfg.get_choice("lqg.terminal_sign", {"plus", "minus"}) == "plus"
                        ? TerminalSign::plus
                        : TerminalSign::minus;
  c.noise_variance_factor = cfg.get_double("lqg.noise_variance_factor");
  c.x0 = cfg.get_doubles("lqg.x0");
  c.n_paths_list = cfg.get_sizes("run.n_paths");
  c.n_repetitions = cfg.get_size("run.repetitions");
  c.base_seed = cfg.get_u64("run.base_seed");
  c.reference_samples = cfg.get_size("run.reference_samples");
  c.workers = workers_from(cfg);
  c.validate();
  return c;
}

// H steps of a one-dimensional Gaussian walk, zero reward, terminal == c.
inline MdpSpec constant_spec(const Config& cfg) {
  MdpSpec spec;
  spec.horizon = cfg.get_size("constant.horizon");
  const double c = cfg.get_double("constant.value");
  const double sigma = cfg.get_double("constant.sigma");
  spec.reward = [](std::size_t, ConstVec, ConstVec) { return 0.0; };
  spec.terminal = [c](ConstVec) { return c; };
  spec.kernel = std::make_shared<GaussianShiftKernel>(
      GaussianShiftKernel::uniform(sigma, std::max<std::size_t>(spec.horizon, 1), 1));
  spec.validate();
  return spec;
}

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects outputs of one command and writes manifest.json last.
class Run {
 public:
  Run(const Options& opt, const Config& cfg)
      : command_(opt.command), cfg_(cfg), out_dir_(opt.out_dir), started_(utc_now()) {
    std::filesystem::create_directories(out_dir_);
  }

  std::filesystem::path path(const std::string& name) const { return out_dir_ / name; }

  std::ofstream open(const std::string& name) {
    const auto p = path(name);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    outputs_.push_back(p.string());
    return out;
  }

  void write_json(const std::string& name, const nlohmann::json& j) {
    auto out = open(name);
    out << j.dump(2) << '\n';
  }

  void finish() {
    nlohmann::json m;
    m["command"] = command_;
    m["resolved_config"] = cfg_.resolved();
    m["artifact_version"] = MESHMDP_VERSION;
    m["base_seed"] = cfg_.get_u64("run.base_seed");
    m["outputs"] = outputs_;
    m["started"] = started_;
    m["finished"] = utc_now();
    std::ofstream out(path("manifest.json"), std::ios::binary);
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  const Config& cfg_;
  std::filesystem::path out_dir_;
  std::string started_;
  std::vector<std::string> outputs_;
};

inline nlohmann::json json_of(const CostCounter& c) {
  return {{"density_evals", c.density_evals},
          {"denominator_evals", c.denominator_evals},
          {"numerator_evals", c.numerator_evals},
          {"weight_builds", c.weight_builds},
          {"hn2_budget", c.hn2_budget}};
}

inline nlohmann::json json_of(const KernelDiagnostics& d) {
  return {{"R_N", d.R_N},
          {"delta_D", d.delta_D},
          {"Lambda", d.Lambda},
          {"lipschitz", d.lipschitz},
          {"tail_mass_bound", d.tail_mass_bound}};
}

inline nlohmann::json json_of(const OracleEstimate& e, nlohmann::json params) {
  nlohmann::json j = {{"method", to_string(e.method)},
                      {"value", e.value},
                      {"std_error", e.std_error},
                      {"params", std::move(params)}};
  if (e.method == OracleMethod::grid_dp) j["params"]["refinement_error"] = e.refinement_error;
  return j;
}

class SelfTest {
 public:
  SelfTest(const Config& cfg, bool enabled)
      : enabled_(enabled), lo_(cfg.get_double("self_test.min")), hi_(cfg.get_double("self_test.max")),
        std_max_(cfg.get_double("self_test.std_max")) {}

  void range(const std::string& what, double v) {
    check(what + " = " + csv::number(v) + " in [" + csv::number(lo_) + ", " + csv::number(hi_) + "]",
          v >= lo_ && v <= hi_);
  }
  void std_bound(const std::string& what, double v) {
    check(what + " = " + csv::number(v) + " <= " + csv::number(std_max_), v <= std_max_);
  }
  void check(const std::string& what, bool ok) {
    if (!enabled_) return;
    std::cout << "self-test " << (ok ? "PASS" : "FAIL") << ": " << what << '\n';
    failed_ |= !ok;
  }
  int code(int otherwise) const { return enabled_ && failed_ ? kSelfTestFailure : otherwise; }

 private:
  bool enabled_;
  double lo_, hi_, std_max_;
  bool failed_ = false;
};

inline int cmd_solve(const Options& opt, const Config& cfg) {
  const std::string type = cfg.get_choice("problem.type", {"lqg", "constant"});
  const std::size_t n_paths = cfg.get_size("solve.n_paths");
  const std::size_t rep = cfg.get_size("solve.repetition");
  const std::uint64_t base = cfg.get_u64("run.base_seed");
  const unsigned workers = workers_from(cfg);
  const std::size_t eval_paths = cfg.get_size("solve.eval_paths");
  const bool write_mesh = cfg.get_bool("solve.write_mesh");
  const double gamma = cfg.get_double("solve.gamma");

  MdpSpec spec;
  std::vector<double> x0;
  std::optional<ActionSet> actions;
  double action_bound = 0.0;
  if (type == "lqg") {
    const LqgConfig lc = lqg_config_from(cfg);
    spec = build_lqg_spec(lc);
    x0 = lc.start();
    action_bound = lc.increment_halfwidth();
    actions = sample_actions(lc.dim, lc.n_actions, action_bound,
                             derive_seed(lc.base_seed, "actions", n_paths, rep));
  } else {
    spec = constant_spec(cfg);
    x0 = {0.0};
    actions = ActionSet(1, {0.0});
  }
  const auto t0 = std::chrono::steady_clock::now();
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), x0, n_paths,
                                            derive_seed(base, "mesh", n_paths, rep), workers);
  const SolveResult result = backward_solve(mesh, spec, *actions, {workers});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Run run(opt, cfg);
  {
    auto out = run.open("values.csv");
    write_values_csv(out, result.values, result.policy);
  }
  {
    auto out = run.open("actions.csv");
    write_actions_csv(out, *actions);
  }
  if (write_mesh) {
    auto out = run.open("mesh.csv");
    mesh.write_csv(out);
  }

  nlohmann::json summary = {{"root_value", result.values.root_value},
                            {"degenerate_count", result.degenerate_count},
                            {"bound_violations", result.bound_violations},
                            {"cost", json_of(result.cost)},
                            {"n_paths", n_paths},
                            {"n_actions", actions->size()},
                            {"zero_action_prepended", type == "lqg"},
                            {"wall_time_s", wall}};
  if (const auto* g = dynamic_cast<const GaussianShiftKernel*>(spec.kernel.get()))
    summary["kernel_diagnostics"] = json_of(diagnostics_for_schedule(*g, action_bound, n_paths, gamma));

  std::cout << "root_value = " << csv::number(result.values.root_value) << '\n'
            << "degenerate_count = " << result.degenerate_count << '\n'
            << "density_evals = " << result.cost.density_evals << '\n'
            << "denominator_evals = " << result.cost.denominator_evals << '\n'
            << "numerator_evals = " << result.cost.numerator_evals << '\n'
            << "hn2_budget = " << result.cost.hn2_budget << '\n';
  if (result.degenerate_count > 0)
    std::cerr << "warning: " << result.degenerate_count
              << " degenerate weight vectors (0/0 = 0 applied)\n";
  if (result.bound_violations > 0)
    std::cerr << "warning: " << result.bound_violations << " values exceed the reward bound\n";

  if (eval_paths > 0) {
    const PolicyEstimate pe = evaluate_policy(spec, mesh, result.policy, result.values, eval_paths,
                                              derive_seed(base, "policy-eval-run", n_paths, rep),
                                              workers);
    summary["policy_evaluation"] = {{"mean", pe.mean}, {"std_error", pe.std_error}, {"n_paths", pe.n_paths}};
    std::cout << "policy_value = " << csv::number(pe.mean) << " +- " << csv::number(pe.std_error)
              << '\n';
  }
  run.write_json("summary.json", summary);
  run.finish();

  SelfTest st(cfg, opt.self_test);
  st.range("root_value", result.values.root_value);
  return st.code(kOk);
}

inline int cmd_lqg_table(const Options& opt, const Config& cfg) {
  const LqgConfig lc = lqg_config_from(cfg);
  const TableResult t = run_table(lc);
  Run run(opt, cfg);
  {
    auto out = run.open("table.csv");
    write_table_csv(out, t);
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json j = {{"n_paths", r.n_paths}, {"mean", r.mean}, {"abs_bias", r.abs_bias},
                        {"std", r.std}, {"mean_abs_error", r.mean_abs_error},
                        {"values", r.values}, {"warnings", r.warnings}};
    if (r.error) j["error"] = *r.error;
    rows.push_back(std::move(j));
  }
  run.write_json("summary.json",
                 {{"reference", json_of(t.reference, {{"samples", lc.reference_samples}})},
                  {"rows", rows},
                  {"zero_action_prepended", true}});
  run.finish();

  write_table_csv(std::cout, t);
  bool failed = false;
  for (const auto& r : t.rows) {
    for (const auto& w : r.warnings) std::cerr << "warning: N=" << r.n_paths << ": " << w << '\n';
    if (r.error) {
      std::cerr << "error: N=" << r.n_paths << ": " << *r.error << '\n';
      failed = true;
    }
  }
  SelfTest st(cfg, opt.self_test);
  if (!t.rows.empty() && !t.rows.back().error) {
    st.range("mean at N=" + std::to_string(t.rows.back().n_paths), t.rows.back().mean);
    st.std_bound("std at N=" + std::to_string(t.rows.back().n_paths), t.rows.back().std);
  }
  return failed ? kNumericError : st.code(kOk);
}

inline int cmd_lqg_sweep(const Options& opt, const Config& cfg) {
  const LqgConfig lc = lqg_config_from(cfg);
  const std::vector<SweepRow> rows = lambda_sweep(lc, cfg.get_doubles("sweep.lambdas"));
  Run run(opt, cfg);
  {
    auto out = run.open("sweep.csv");
    write_sweep_csv(out, rows);
  }
  run.finish();
  write_sweep_csv(std::cout, rows);
  bool failed = false;
  for (const auto& r : rows)
    if (r.error) {
      std::cerr << "error: lambda=" << csv::number(r.lambda) << ": " << *r.error << '\n';
      failed = true;
    }
  return failed ? kNumericError : kOk;
}

// Evenly spaced actions on [-halfwidth, halfwidth]; an odd count contains 0.
inline ActionSet uniform_action_grid(std::size_t count, double halfwidth) {
  detail::require(count >= 1, "uniform_action_grid: count must be >= 1");
  std::vector<double> a(count, 0.0);
  for (std::size_t i = 0; count > 1 && i < count; ++i)
    a[i] = -halfwidth + 2.0 * halfwidth * static_cast<double>(i) / static_cast<double>(count - 1);
  return ActionSet(1, std::move(a));
}

inline int cmd_oracle(const Options& opt, const Config& cfg) {
  const std::string method = cfg.get_choice("oracle.method", {"closed_form", "grid_dp"});
  const LqgConfig lc = lqg_config_from(cfg);
  OracleEstimate est;
  nlohmann::json params = {{"lambda", lc.lambda}, {"T", lc.horizon_time}, {"x0", lc.start()},
                           {"terminal_sign", to_string(lc.terminal_sign)}};
  if (method == "closed_form") {
    const double t = cfg.get_double("oracle.t");
    est = lqg_closed_form(lc.start(), t, lc.lambda, lc.horizon_time, lqg_terminal(lc.terminal_sign),
                          lc.reference_samples, derive_seed(lc.base_seed, "reference", 0), lc.workers);
    params["t"] = t;
    params["n_samples"] = lc.reference_samples;
  } else {
    detail::require(lc.dim == 1, "grid_dp oracle: lqg.dim must be 1");
    const MdpSpec spec = build_lqg_spec(lc);
    const std::size_t n_actions = cfg.get_size("oracle.n_actions");
    GridOptions go;
    go.halfwidth = cfg.get_double("oracle.grid_halfwidth");
    go.step = cfg.get_double("oracle.grid_step");
    go.quadrature_nodes = cfg.get_size("oracle.quadrature_nodes");
    go.tolerance = cfg.get_double("oracle.tolerance");
    go.workers = lc.workers;
    est = grid_dp(spec, lc.start()[0], uniform_action_grid(n_actions, lc.increment_halfwidth()), go);
    params["n_actions"] = n_actions;
    params["delta"] = lc.delta;
    params["noise_variance_factor"] = lc.noise_variance_factor;
    params["quadrature_nodes"] = go.quadrature_nodes;
  }
  Run run(opt, cfg);
  run.write_json("oracle.json", json_of(est, params));
  run.finish();
  std::cout << "method = " << to_string(est.method) << '\n'
            << "value = " << csv::number(est.value) << '\n'
            << "std_error = " << csv::number(est.std_error) << '\n';
  if (est.method == OracleMethod::grid_dp)
    std::cout << "refinement_error = " << csv::number(est.refinement_error) << '\n';
  SelfTest st(cfg, opt.self_test);
  st.range("oracle value", est.value);
  return st.code(kOk);
}

inline int cmd_check_weights(const Options& opt, const Config& cfg) {
  const LqgConfig lc = lqg_config_from(cfg);
  detail::require(lc.dim == 1, "check-weights: lqg.dim must be 1");
  const MdpSpec spec = build_lqg_spec(lc);
  const std::vector<double> xs = cfg.get_doubles("weights.x");
  detail::require(xs.size() <= 1, "check-weights: weights.x must be a scalar");
  const double x = xs.empty() ? lc.start()[0] : xs[0];
  const double a = cfg.get_double("weights.a");
  const std::size_t h = cfg.get_size("weights.h");
  const std::string fname = cfg.get_choice("weights.function", {"terminal", "one"});
  const TerminalFn terminal = spec.terminal;
  const std::function<double(double)> f =
      fname == "one" ? std::function<double(double)>([](double) { return 1.0; })
                     : std::function<double(double)>([terminal](double z) { return terminal(ConstVec(&z, 1)); });
  const std::vector<std::size_t> sizes = cfg.get_sizes("weights.sizes");
  detail::require(!sizes.empty(), "check-weights: weights.sizes is empty");
  const auto rows = weight_consistency_study(spec, lc.start(), sizes, x, a, h, f, lc.base_seed,
                                             cfg.get_size("weights.replications"), lc.workers);
  Run run(opt, cfg);
  {
    auto out = run.open("consistency.csv");
    write_consistency_csv(out, rows);
  }
  run.finish();
  write_consistency_csv(std::cout, rows);

  SelfTest st(cfg, opt.self_test);
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    monotone &= rows[i].median_abs_error < rows[i - 1].median_abs_error;
  st.check("median error decreases with N", monotone || fname == "one");
  const double tol = cfg.get_double("weights.mass_tolerance");
  st.check("weight mass within " + csv::number(tol) + " of N/(N-1) at N=" +
               std::to_string(rows.back().n_paths),
           rows.back().median_mass_rel_deviation <= tol);
  return st.code(kOk);
}

inline int cmd_calibrate(const Options& opt, const Config& cfg) {
  const LqgConfig lc = lqg_config_from(cfg);
  if (cfg.raw("calibrate.target").empty()) cfg.fail("calibrate.target", "a target value is required");
  const double target = cfg.get_double("calibrate.target");
  if (!std::isfinite(target)) cfg.fail("calibrate.target", "target must be finite");
  const CalibrationResult c = calibrate_lambda(lc, cfg.get_doubles("calibrate.candidates"), target);
  Run run(opt, cfg);
  {
    auto out = run.open("calibration.csv");
    write_calibration_csv(out, c);
  }
  run.finish();
  write_calibration_csv(std::cout, c);
  std::cout << "selected_lambda = " << csv::number(c.lambda) << '\n';
  SelfTest st(cfg, opt.self_test);
  st.range("selected lambda", c.lambda);
  return st.code(kOk);
}

// Maps exceptions onto the exit-code contract.
inline int run_command(const Options& opt) {
  try {
    const Config cfg = resolve_config(opt);
    if (opt.command == "solve") return cmd_solve(opt, cfg);
    if (opt.command == "lqg-table") return cmd_lqg_table(opt, cfg);
    if (opt.command == "lqg-sweep") return cmd_lqg_sweep(opt, cfg);
    if (opt.command == "oracle") return cmd_oracle(opt, cfg);
    if (opt.command == "check-weights") return cmd_check_weights(opt, cfg);
    if (opt.command == "calibrate") return cmd_calibrate(opt, cfg);
    std::cerr << "error: unknown command '" << opt.command << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const AccuracyError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  }
}

}  // namespace meshmdp::app
