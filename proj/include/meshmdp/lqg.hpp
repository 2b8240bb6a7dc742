#pragma once

// Discretized linear-quadratic-Gaussian control benchmark.
//
//   S_{h+1} = S_h + a_h + sigma eps_{h+1},   sigma^2 = noise_variance_factor * Delta
//   reward  R_h(x, a) = -|a|^2 / (4 lambda Delta),   terminal F(x) = ±log((1 + |x|^2) / 2)
//
// With noise_variance_factor = 2 the chain is the Euler scheme of
// dX = 2 sqrt(lambda) m dt + sqrt(2) dW whose value has the closed form
// J_0(x) = (1/lambda) log E exp(lambda F(x + sqrt(2T) Z)).
// Actions in `rate` units are control rates m in [-A, A]^d, mapped to
// increments a = 2 sqrt(lambda) Delta m.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "meshmdp/errors.hpp"
#include "meshmdp/kernels.hpp"
#include "meshmdp/mdp.hpp"
#include "meshmdp/oracles.hpp"
#include "meshmdp/parallel.hpp"
#include "meshmdp/rng.hpp"
#include "meshmdp/solver.hpp"

namespace meshmdp {

enum class TerminalSign { plus, minus };
enum class ActionUnits { rate, increment };

inline const char* to_string(TerminalSign s) { return s == TerminalSign::plus ? "plus" : "minus"; }
inline const char* to_string(ActionUnits u) { return u == ActionUnits::rate ? "rate" : "increment"; }

struct LqgConfig {
  std::string config_id = "lqg";
  std::size_t dim = 1;
  double lambda = 1.0;
  double horizon_time = 0.2;  // T
  double delta = 0.01;        // time step
  double action_halfwidth = 1.0;
  ActionUnits action_units = ActionUnits::rate;
  std::size_t n_actions = 50;
  TerminalSign terminal_sign = TerminalSign::minus;
  double noise_variance_factor = 2.0;
  std::vector<double> x0;  // empty: origin
  std::vector<std::size_t> n_paths_list = {10, 100, 200, 500};
  std::size_t n_repetitions = 30;
  std::uint64_t base_seed = 1;
  std::size_t reference_samples = 10000;
  unsigned workers = 1;

  std::size_t horizon() const {
    return static_cast<std::size_t>(std::llround(horizon_time / delta));
  }
  double sigma() const { return std::sqrt(noise_variance_factor * delta); }

  // Half-width of the action box in increment units.
  double increment_halfwidth() const {
    return action_units == ActionUnits::rate ? 2.0 * std::sqrt(lambda) * delta * action_halfwidth
                                             : action_halfwidth;
  }

  std::vector<double> start() const { return x0.empty() ? std::vector<double>(dim, 0.0) : x0; }

  void validate() const {
    detail::require(dim >= 1, "LqgConfig: dim must be >= 1");
    detail::require(lambda > 0.0 && std::isfinite(lambda), "LqgConfig: lambda must be positive");
    detail::require(delta > 0.0 && std::isfinite(delta), "LqgConfig: delta must be positive");
    detail::require(horizon_time > 0.0 && std::isfinite(horizon_time), "LqgConfig: T must be positive");
    detail::require(horizon() >= 1, "LqgConfig: round(T / delta) must be >= 1");
    detail::require(action_halfwidth >= 0.0, "LqgConfig: action_halfwidth must be nonnegative");
    detail::require(n_actions >= 1, "LqgConfig: n_actions must be >= 1");
    detail::require(noise_variance_factor > 0.0, "LqgConfig: noise_variance_factor must be positive");
    detail::require(x0.empty() || x0.size() == dim, "LqgConfig: x0 dimension mismatch");
    detail::require(!n_paths_list.empty(), "LqgConfig: n_paths list is empty");
    for (std::size_t n : n_paths_list) detail::require(n >= 2, "LqgConfig: every N must be >= 2");
    detail::require(n_repetitions >= 1, "LqgConfig: repetitions must be >= 1");
    detail::require(reference_samples >= 2, "LqgConfig: reference samples must be >= 2");
  }
};

inline TerminalFn lqg_terminal(TerminalSign sign) {
  const double s = sign == TerminalSign::plus ? 1.0 : -1.0;
  return [s](ConstVec x) { return s * std::log((1.0 + detail::squared_norm(x)) / 2.0); };
}

inline MdpSpec build_lqg_spec(const LqgConfig& cfg) {
  cfg.validate();
  MdpSpec spec;
  spec.state_dim = cfg.dim;
  spec.action_dim = cfg.dim;
  spec.horizon = cfg.horizon();
  const double cost = 1.0 / (4.0 * cfg.lambda * cfg.delta);
  spec.reward = [cost](std::size_t, ConstVec, ConstVec a) { return -cost * detail::squared_norm(a); };
  spec.terminal = lqg_terminal(cfg.terminal_sign);
  spec.kernel = std::make_shared<GaussianShiftKernel>(
      GaussianShiftKernel::uniform(cfg.sigma(), spec.horizon, cfg.dim));
  return spec;
}

// `count` actions in [-halfwidth, halfwidth]^d: the zero action first, then
// count - 1 uniform draws from Substream(seed).
inline ActionSet sample_actions(std::size_t d, std::size_t count, double halfwidth,
                                std::uint64_t seed) {
  detail::require(count >= 1, "sample_actions: count must be >= 1");
  detail::require(d >= 1, "sample_actions: dimension must be >= 1");
  detail::require(halfwidth >= 0.0, "sample_actions: halfwidth must be nonnegative");
  std::vector<double> flat(count * d, 0.0);
  Substream rng(seed);
  for (std::size_t i = d; i < flat.size(); ++i)
    flat[i] = halfwidth > 0.0 ? std::clamp(rng.uniform(-halfwidth, halfwidth), -halfwidth, halfwidth)
                              : 0.0;
  return ActionSet(d, std::move(flat),
                   {ActionSet::Origin::uniform_sampled, seed, count, halfwidth});
}

inline OracleEstimate lqg_reference(const LqgConfig& cfg) {
  return lqg_closed_form(cfg.start(), 0.0, cfg.lambda, cfg.horizon_time,
                         lqg_terminal(cfg.terminal_sign), cfg.reference_samples,
                         derive_seed(cfg.base_seed, "reference", 0), cfg.workers);
}

struct SolveSummary {
  double root_value = 0.0;
  std::size_t degenerate_count = 0;
  CostCounter cost;
};

// One full solve: fresh mesh and fresh action set for (N, repetition).
inline SolveSummary lqg_solve_once(const LqgConfig& cfg, const MdpSpec& spec, std::size_t n_paths,
                                   std::size_t repetition, unsigned workers) {
  const ActionSet actions =
      sample_actions(cfg.dim, cfg.n_actions, cfg.increment_halfwidth(),
                     derive_seed(cfg.base_seed, "actions", n_paths, repetition));
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), cfg.start(), n_paths,
                                            derive_seed(cfg.base_seed, "mesh", n_paths, repetition),
                                            workers);
  const SolveResult r = backward_solve(mesh, spec, actions, {workers});
  return {r.values.root_value, r.degenerate_count, r.cost};
}

struct RunResult {
  std::size_t n_paths = 0;
  double mean = 0.0;
  double abs_bias = 0.0;         // |mean - reference|
  double std = 0.0;              // over repetitions (n - 1 denominator)
  double mean_abs_error = 0.0;   // mean |root - reference|
  double reference = 0.0;
  double reference_std = 0.0;
  std::size_t degenerate_weight_count = 0;
  std::uint64_t density_evals = 0;  // summed over repetitions
  double wall_time = 0.0;           // seconds
  std::vector<double> values;       // per repetition, ascending index
  std::optional<std::string> error;
  std::vector<std::string> warnings;
};

struct TableResult {
  LqgConfig config;
  OracleEstimate reference;
  std::vector<RunResult> rows;  // ascending N

  bool ok() const {
    for (const auto& r : rows)
      if (r.error) return false;
    return true;
  }
};

inline RunResult run_row(const LqgConfig& cfg, const MdpSpec& spec, std::size_t n_paths,
                         const OracleEstimate& reference) {
  RunResult row;
  row.n_paths = n_paths;
  row.reference = reference.value;
  row.reference_std = reference.std_error;
  const auto start = std::chrono::steady_clock::now();

  const std::size_t reps = cfg.n_repetitions;
  std::vector<SolveSummary> solves(reps);
  const unsigned outer = static_cast<unsigned>(std::min<std::size_t>(std::max(cfg.workers, 1u), reps));
  const unsigned inner = std::max(1u, cfg.workers / outer);
  try {
    parallel_for(reps, outer,
                 [&](std::size_t r) { solves[r] = lqg_solve_once(cfg, spec, n_paths, r, inner); });
  } catch (const std::exception& e) {
    row.error = e.what();
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
  }

  double sum = 0.0;
  double abs_err = 0.0;
  for (const auto& s : solves) {
    row.values.push_back(s.root_value);
    sum += s.root_value;
    abs_err += std::fabs(s.root_value - reference.value);
    row.degenerate_weight_count += s.degenerate_count;
    row.density_evals += s.cost.density_evals;
  }
  row.mean = sum / static_cast<double>(reps);
  row.mean_abs_error = abs_err / static_cast<double>(reps);
  row.abs_bias = std::fabs(row.mean - reference.value);
  if (reps > 1) {
    double ss = 0.0;
    for (double v : row.values) ss += (v - row.mean) * (v - row.mean);
    row.std = std::sqrt(ss / static_cast<double>(reps - 1));
  } else {
    row.std = 0.0;
    row.warnings.push_back("single repetition: std reported as 0");
  }
  if (row.degenerate_weight_count > 0)
    row.warnings.push_back(std::to_string(row.degenerate_weight_count) +
                           " degenerate weight vectors (0/0 = 0 applied)");
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

inline TableResult run_table(const LqgConfig& cfg) {
  cfg.validate();
  TableResult out;
  out.config = cfg;
  const MdpSpec spec = build_lqg_spec(cfg);
  out.reference = lqg_reference(cfg);
  std::vector<std::size_t> sizes = cfg.n_paths_list;
  std::sort(sizes.begin(), sizes.end());
  for (std::size_t n : sizes) out.rows.push_back(run_row(cfg, spec, n, out.reference));
  return out;
}

struct SweepRow {
  double lambda = 0.0;
  double mesh_value = 0.0;
  double mesh_std = 0.0;
  double reference_value = 0.0;
  double reference_std = 0.0;
  std::size_t n_paths = 0;
  std::optional<std::string> error;
};

// Every lambda reuses the table's seeds, so a lambda equal to cfg.lambda
// reproduces the table row for the largest N.
inline std::vector<SweepRow> lambda_sweep(const LqgConfig& cfg, const std::vector<double>& lambdas) {
  cfg.validate();
  detail::require(!lambdas.empty(), "lambda_sweep: no lambda values");
  for (double l : lambdas) detail::require(l > 0.0, "lambda_sweep: every lambda must be positive");
  const std::size_t n_paths = *std::max_element(cfg.n_paths_list.begin(), cfg.n_paths_list.end());
  std::vector<SweepRow> out;
  for (double l : lambdas) {
    LqgConfig c = cfg;
    c.lambda = l;
    const OracleEstimate ref = lqg_reference(c);
    const RunResult row = run_row(c, build_lqg_spec(c), n_paths, ref);
    out.push_back({l, row.mean, row.std, ref.value, ref.std_error, n_paths, row.error});
  }
  return out;
}

struct CalibrationResult {
  double lambda = 0.0;
  double target = 0.0;
  std::vector<std::pair<double, OracleEstimate>> scanned;
};

// Picks the lambda whose closed-form reference is closest to `target`.
inline CalibrationResult calibrate_lambda(const LqgConfig& cfg, const std::vector<double>& candidates,
                                          double target) {
  detail::require(!candidates.empty(), "calibrate_lambda: no candidates");
  CalibrationResult out;
  out.target = target;
  double best = std::numeric_limits<double>::infinity();
  for (double l : candidates) {
    detail::require(l > 0.0, "calibrate_lambda: candidates must be positive");
    LqgConfig c = cfg;
    c.lambda = l;
    const OracleEstimate ref = lqg_reference(c);
    out.scanned.emplace_back(l, ref);
    if (std::fabs(ref.value - target) < best) {
      best = std::fabs(ref.value - target);
      out.lambda = l;
    }
  }
  return out;
}

}  // namespace meshmdp
