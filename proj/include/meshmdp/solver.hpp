#pragma once

// Weighted stochastic mesh: leave-one-out likelihood-ratio weights, the mesh
// expectation operator and the backward value recursion.
//
// For a mesh S_h^(n) and a point (x, a) at step h the weights are
//
//   w_n(x, a) ∝ p_h^a(S_{h+1}^(n) | x) / sum_{k != n} p_h^{b_h}(S_{h+1}^(n) | S_h^(k))
//
// normalized over n, with 0/0 = 0 when every numerator vanishes.  All
// arithmetic runs in log-space; the denominators depend only on n and are
// shared by every (x, a) at a step.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "meshmdp/errors.hpp"
#include "meshmdp/kernels.hpp"
#include "meshmdp/mdp.hpp"
#include "meshmdp/numeric.hpp"
#include "meshmdp/parallel.hpp"

namespace meshmdp {

// log sum_{k != n} p_h^{b_h}(S_{h+1}^(n) | S_h^(k)) for each n.
struct DenominatorTable {
  std::size_t step = 0;
  std::vector<double> log_denoms;
  std::vector<std::uint8_t> neg_inf_flags;  // 1 where every term underflowed
  std::uint64_t density_evals = 0;          // N (N - 1)
};

struct WeightVector {
  std::vector<double> weights;
  bool degenerate = false;
};

struct ExpectationResult {
  double value = 0.0;
  WeightVector weights;
};

// V̄_h at the mesh points, N x (H + 1).
class ValueTable {
 public:
  ValueTable(std::size_t n_paths, std::size_t horizon)
      : n_paths_(n_paths), horizon_(horizon), values_(n_paths * (horizon + 1), 0.0) {}

  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t horizon() const noexcept { return horizon_; }

  double at(std::size_t n, std::size_t h) const { return values_[h * n_paths_ + n]; }
  double& at(std::size_t n, std::size_t h) { return values_[h * n_paths_ + n]; }
  std::span<const double> step_values(std::size_t h) const {
    return std::span<const double>(values_).subspan(h * n_paths_, n_paths_);
  }

  double root_value = 0.0;

 private:
  std::size_t n_paths_;
  std::size_t horizon_;
  std::vector<double> values_;  // [h][n]
};

struct CostCounter {
  std::uint64_t density_evals = 0;
  std::uint64_t denominator_evals = 0;
  std::uint64_t numerator_evals = 0;
  std::uint64_t weight_builds = 0;
  std::uint64_t hn2_budget = 0;  // H N^2
};

namespace detail {

inline void check_mesh_step(const TrajectoryMesh& mesh, std::size_t h) {
  detail::require(mesh.n_paths() >= 2, "leave-one-out weights need at least 2 paths");
  detail::require(h < mesh.horizon(), "step index out of range");
}

// t_n = log numerator_n - log denominator_n, written over `log_num`.
inline void to_log_ratios(std::span<double> log_num, const DenominatorTable& denoms) {
  for (std::size_t n = 0; n < log_num.size(); ++n) {
    if (log_num[n] == kNegInf) continue;
    if (denoms.neg_inf_flags[n])
      throw NumericError("mesh weight: zero leave-one-out denominator with positive numerator at n=" +
                         std::to_string(n));
    log_num[n] -= denoms.log_denoms[n];
  }
}

}  // namespace detail

inline DenominatorTable precompute_denominators(const TrajectoryMesh& mesh,
                                                const TransitionKernel& kernel, std::size_t h,
                                                unsigned workers = 1) {
  detail::check_mesh_step(mesh, h);
  detail::require(kernel.dim() == mesh.dim(), "precompute_denominators: kernel dimension mismatch");
  const std::size_t n_paths = mesh.n_paths();
  const std::size_t d = mesh.dim();
  const ConstVec sources = mesh.step(h);
  const ConstVec targets = mesh.step(h + 1);
  const ConstVec control = mesh.representative_controls()[h];

  DenominatorTable table;
  table.step = h;
  table.log_denoms.assign(n_paths, 0.0);
  table.neg_inf_flags.assign(n_paths, 0);
  table.density_evals = static_cast<std::uint64_t>(n_paths) * (n_paths - 1);

  parallel_for(n_paths, workers, [&](std::size_t n) {
    std::vector<double> terms(n_paths - 1);
    const ConstVec y = targets.subspan(n * d, d);
    const std::span<double> out(terms);
    kernel.log_density_sources(h, sources.subspan(0, n * d), control, y, out.subspan(0, n));
    kernel.log_density_sources(h, sources.subspan((n + 1) * d), control, y, out.subspan(n));
    const double v = log_sum_exp(terms);
    table.log_denoms[n] = v;
    table.neg_inf_flags[n] = v == kNegInf ? 1 : 0;
  });
  return table;
}

// E_{h,N}(x, a; f) = sum_n f_values[n] w_n(x, a), f_values[n] = f(S_{h+1}^(n)).
inline ExpectationResult mesh_expectation(ConstVec x, ConstVec a, std::size_t h,
                                          std::span<const double> f_values,
                                          const TrajectoryMesh& mesh,
                                          const TransitionKernel& kernel,
                                          const DenominatorTable& denoms) {
  detail::check_mesh_step(mesh, h);
  detail::require(denoms.step == h && denoms.log_denoms.size() == mesh.n_paths(),
                  "mesh_expectation: denominators built for another step or mesh");
  detail::require(f_values.size() == mesh.n_paths(), "mesh_expectation: f_values size mismatch");
  for (double v : f_values)
    detail::require(std::isfinite(v), "mesh_expectation: f_values must be finite");

  ExpectationResult out;
  std::vector<double> t(mesh.n_paths());
  kernel.log_density_targets(h, x, a, mesh.step(h + 1), t);
  detail::to_log_ratios(t, denoms);
  const SelfNormalizedMean m = self_normalized_mean(t, f_values);
  out.value = m.value;
  out.weights.degenerate = m.degenerate;
  out.weights.weights.assign(t.size(), 0.0);
  if (!m.degenerate) {
    for (std::size_t n = 0; n < t.size(); ++n)
      out.weights.weights[n] = t[n] == kNegInf ? 0.0 : std::exp(t[n] - m.log_normalizer);
  }
  return out;
}

// Unnormalized weight mass sum_n p^a(S_{h+1}^(n)|x) / denominator_n; tends to
// N / (N - 1) as N grows.
inline double unnormalized_weight_mass(ConstVec x, ConstVec a, std::size_t h,
                                       const TrajectoryMesh& mesh, const TransitionKernel& kernel,
                                       const DenominatorTable& denoms) {
  detail::check_mesh_step(mesh, h);
  std::vector<double> t(mesh.n_paths());
  kernel.log_density_targets(h, x, a, mesh.step(h + 1), t);
  detail::to_log_ratios(t, denoms);
  return std::exp(log_sum_exp(t));
}

// |E(f) - E(g)| <= max_n |f_n - g_n| + 1e-12
inline bool contraction_check(std::span<const double> f, std::span<const double> g, ConstVec x,
                              ConstVec a, std::size_t h, const TrajectoryMesh& mesh,
                              const TransitionKernel& kernel, const DenominatorTable& denoms) {
  detail::require(f.size() == g.size(), "contraction_check: size mismatch");
  const double ef = mesh_expectation(x, a, h, f, mesh, kernel, denoms).value;
  const double eg = mesh_expectation(x, a, h, g, mesh, kernel, denoms).value;
  double sup = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) sup = std::fmax(sup, std::fabs(f[n] - g[n]));
  return std::fabs(ef - eg) <= sup + 1e-12;
}

struct BellmanStep {
  std::vector<double> values;       // one per requested point
  std::vector<std::size_t> argmax;  // lowest index among ties
  std::size_t degenerate = 0;       // (point, action) cells where 0/0 = 0 fired
  std::uint64_t numerator_evals = 0;
  std::uint64_t weight_builds = 0;
};

// max_a [ R_h(S_h^(r), a) + E_{h,N}(S_h^(r), a; next_values) ] for r in `points`.
inline BellmanStep bellman_step(const MdpSpec& spec, const TrajectoryMesh& mesh,
                                const ActionSet& actions, std::size_t h,
                                std::span<const double> next_values,
                                const DenominatorTable& denoms,
                                std::span<const std::size_t> points, unsigned workers = 1) {
  detail::check_mesh_step(mesh, h);
  detail::require(next_values.size() == mesh.n_paths(), "bellman_step: next_values size mismatch");
  detail::require(denoms.step == h, "bellman_step: denominators built for another step");
  const TransitionKernel& kernel = *spec.kernel;
  const std::size_t n_paths = mesh.n_paths();
  const ConstVec targets = mesh.step(h + 1);

  BellmanStep out;
  out.values.assign(points.size(), 0.0);
  out.argmax.assign(points.size(), 0);
  std::vector<std::size_t> degenerate(points.size(), 0);

  parallel_for(points.size(), workers, [&](std::size_t i) {
    const ConstVec x = mesh.state(points[i], h);
    std::vector<double> t(n_paths);
    double best = kNegInf;
    std::size_t best_index = 0;
    for (std::size_t j = 0; j < actions.size(); ++j) {
      const ConstVec a = actions[j];
      kernel.log_density_targets(h, x, a, targets, t);
      detail::to_log_ratios(t, denoms);
      const SelfNormalizedMean m = self_normalized_mean_inplace(t, next_values);
      if (m.degenerate) ++degenerate[i];
      const double q = spec.reward(h, x, a) + m.value;
      if (std::isnan(q)) throw NumericError("bellman_step: NaN action value at step " + std::to_string(h));
      if (q > best || j == 0) {
        best = q;
        best_index = j;
      }
    }
    out.values[i] = best;
    out.argmax[i] = best_index;
  });

  out.degenerate = std::accumulate(degenerate.begin(), degenerate.end(), std::size_t{0});
  out.weight_builds = static_cast<std::uint64_t>(points.size()) * actions.size();
  out.numerator_evals = out.weight_builds * n_paths;
  return out;
}

struct SolveOptions {
  unsigned workers = 1;
};

struct SolveResult {
  ValueTable values;
  PolicyTable policy;
  CostCounter cost;
  std::size_t degenerate_count = 0;
  std::size_t bound_violations = 0;  // |V̄_h| > (H - h + 1) G
};

inline SolveResult backward_solve(const TrajectoryMesh& mesh, const MdpSpec& spec,
                                  const ActionSet& actions, const SolveOptions& options = {}) {
  spec.validate();
  detail::require(mesh.horizon() == spec.horizon, "backward_solve: mesh horizon != spec horizon");
  detail::require(mesh.dim() == spec.state_dim, "backward_solve: mesh dimension != state_dim");
  detail::require(actions.dim() == spec.action_dim, "backward_solve: action dimension mismatch");
  detail::require(mesh.n_paths() >= 2, "backward_solve: need at least 2 paths");

  const std::size_t n_paths = mesh.n_paths();
  const std::size_t horizon = spec.horizon;
  SolveResult result{ValueTable(n_paths, horizon), PolicyTable(n_paths, horizon, actions), {}, 0, 0};
  ValueTable& values = result.values;
  const double bound = spec.reward_bound;

  for (std::size_t n = 0; n < n_paths; ++n) {
    values.at(n, horizon) = spec.terminal(mesh.state(n, horizon));
    if (!std::isfinite(values.at(n, horizon)))
      throw NumericError("backward_solve: non-finite terminal value at path " + std::to_string(n));
    if (std::fabs(values.at(n, horizon)) > bound) ++result.bound_violations;
  }

  std::vector<std::size_t> all_points(n_paths);
  std::iota(all_points.begin(), all_points.end(), std::size_t{0});
  const std::size_t root_point[] = {0};

  for (std::size_t step = horizon; step-- > 0;) {
    const DenominatorTable denoms =
        precompute_denominators(mesh, *spec.kernel, step, options.workers);
    result.cost.denominator_evals += denoms.density_evals;

    // Every chain starts at x0, so step 0 has a single distinct point.
    const std::span<const std::size_t> points =
        step == 0 ? std::span<const std::size_t>(root_point) : std::span<const std::size_t>(all_points);
    const BellmanStep update = bellman_step(spec, mesh, actions, step, values.step_values(step + 1),
                                            denoms, points, options.workers);
    result.cost.numerator_evals += update.numerator_evals;
    result.cost.weight_builds += update.weight_builds;
    result.degenerate_count += update.degenerate;

    const double step_bound = static_cast<double>(horizon - step + 1) * bound;
    for (std::size_t n = 0; n < n_paths; ++n) {
      const std::size_t i = step == 0 ? 0 : n;
      values.at(n, step) = update.values[i];
      result.policy.set_choice(n, step, update.argmax[i]);
      if ((step > 0 || n == 0) && std::fabs(update.values[i]) > step_bound)
        ++result.bound_violations;
    }
  }

  values.root_value = values.at(0, 0);
  result.cost.density_evals = result.cost.denominator_evals + result.cost.numerator_evals;
  result.cost.hn2_budget = static_cast<std::uint64_t>(horizon) * n_paths * n_paths;
  return result;
}

}  // namespace meshmdp
