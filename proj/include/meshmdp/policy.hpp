#pragma once

// Forward-simulation estimate of the value of the greedy mesh policy.  Off the
// mesh the policy acts like the nearest (Euclidean) mesh point at the same step.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "meshmdp/errors.hpp"
#include "meshmdp/mdp.hpp"
#include "meshmdp/parallel.hpp"
#include "meshmdp/rng.hpp"
#include "meshmdp/solver.hpp"

namespace meshmdp {

struct PolicyEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

inline std::size_t nearest_mesh_point(const TrajectoryMesh& mesh, std::size_t h, ConstVec x) {
  const std::size_t d = mesh.dim();
  const ConstVec pts = mesh.step(h);
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < mesh.n_paths(); ++n) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double r = pts[n * d + k] - x[k];
      d2 += r * r;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = n;
    }
  }
  return best;
}

// Path i draws step h from Substream(derive_seed(seed, "policy-eval", i, h)).
inline PolicyEstimate evaluate_policy(const MdpSpec& spec, const TrajectoryMesh& mesh,
                                      const PolicyTable& policy, const ValueTable& values,
                                      std::size_t n_eval_paths, std::uint64_t seed,
                                      unsigned workers = 1) {
  spec.validate();
  detail::require(n_eval_paths > 0, "evaluate_policy: n_eval_paths must be positive");
  detail::require(policy.n_paths() == mesh.n_paths() && policy.horizon() == mesh.horizon(),
                  "evaluate_policy: policy does not match the mesh");
  detail::require(values.n_paths() == mesh.n_paths() && values.horizon() == mesh.horizon(),
                  "evaluate_policy: value table does not match the mesh");
  detail::require(mesh.horizon() == spec.horizon && mesh.dim() == spec.state_dim,
                  "evaluate_policy: mesh does not match the spec");

  const ActionSet& actions = policy.action_set();
  std::vector<double> payoff(n_eval_paths, 0.0);
  parallel_for(n_eval_paths, workers, [&](std::size_t i) {
    std::vector<double> x(mesh.start_state().begin(), mesh.start_state().end());
    std::vector<double> next(x.size());
    double total = 0.0;
    for (std::size_t h = 0; h < spec.horizon; ++h) {
      const std::size_t n = nearest_mesh_point(mesh, h, x);
      const ConstVec a = actions[policy.choice(n, h)];
      total += spec.reward(h, x, a);
      Substream rng(derive_seed(seed, "policy-eval", i, h));
      spec.kernel->sample_into(h, x, a, rng, next);
      x.swap(next);
    }
    payoff[i] = total + spec.terminal(x);
  });

  double mean = 0.0;
  for (double v : payoff) mean += v;
  mean /= static_cast<double>(n_eval_paths);
  double ss = 0.0;
  for (double v : payoff) ss += (v - mean) * (v - mean);
  PolicyEstimate out;
  out.mean = mean;
  out.n_paths = n_eval_paths;
  out.std_error = n_eval_paths > 1
                      ? std::sqrt(ss / static_cast<double>(n_eval_paths - 1) /
                                  static_cast<double>(n_eval_paths))
                      : 0.0;
  return out;
}

}  // namespace meshmdp
