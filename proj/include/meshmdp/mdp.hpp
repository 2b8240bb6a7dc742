#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "meshmdp/errors.hpp"
#include "meshmdp/kernels.hpp"
#include "meshmdp/parallel.hpp"
#include "meshmdp/rng.hpp"

namespace meshmdp {

using RewardFn = std::function<double(std::size_t h, ConstVec x, ConstVec a)>;
using TerminalFn = std::function<double(ConstVec x)>;

// Finite-horizon MDP with a transition density.  `reward_bound` (G) is only
// used to flag suspicious values; it never changes a result.
struct MdpSpec {
  std::size_t state_dim = 1;
  std::size_t action_dim = 1;
  std::size_t horizon = 1;
  RewardFn reward;
  TerminalFn terminal;
  std::shared_ptr<const TransitionKernel> kernel;
  double reward_bound = std::numeric_limits<double>::infinity();

  void validate() const {
    detail::require(horizon >= 1, "MdpSpec: horizon must be >= 1");
    detail::require(state_dim >= 1, "MdpSpec: state_dim must be >= 1");
    detail::require(action_dim >= 1, "MdpSpec: action_dim must be >= 1");
    detail::require(static_cast<bool>(reward), "MdpSpec: reward function missing");
    detail::require(static_cast<bool>(terminal), "MdpSpec: terminal function missing");
    detail::require(kernel != nullptr, "MdpSpec: kernel missing");
    detail::require(kernel->dim() == state_dim, "MdpSpec: kernel dimension != state_dim");
    detail::require(kernel->steps() >= horizon, "MdpSpec: kernel has fewer steps than horizon");
    detail::require(reward_bound >= 0.0, "MdpSpec: reward_bound must be nonnegative");
  }
};

// Finite action grid, stored row-major.
class ActionSet {
 public:
  enum class Origin { explicit_list, uniform_sampled };

  struct Provenance {
    Origin origin = Origin::explicit_list;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    double halfwidth = 0.0;
  };

  ActionSet(std::size_t dim, std::vector<double> flat)
      : ActionSet(dim, std::move(flat), Provenance{Origin::explicit_list, 0, 0, 0.0}) {}

  ActionSet(std::size_t dim, std::vector<double> flat, Provenance provenance)
      : dim_(dim), data_(std::move(flat)), provenance_(provenance) {
    detail::require(dim_ >= 1, "ActionSet: dimension must be >= 1");
    detail::require(!data_.empty(), "ActionSet: must contain at least one action");
    detail::require(data_.size() % dim_ == 0, "ActionSet: data size is not a multiple of dim");
    if (provenance_.origin == Origin::uniform_sampled) {
      for (double c : data_)
        detail::require(std::fabs(c) <= provenance_.halfwidth,
                        "ActionSet: sampled action outside its box");
    }
  }

  static ActionSet from_list(const std::vector<std::vector<double>>& actions) {
    detail::require(!actions.empty(), "ActionSet: must contain at least one action");
    const std::size_t d = actions.front().size();
    std::vector<double> flat;
    flat.reserve(actions.size() * d);
    for (const auto& a : actions) {
      detail::require(a.size() == d, "ActionSet: actions have inconsistent dimensions");
      flat.insert(flat.end(), a.begin(), a.end());
    }
    return ActionSet(d, std::move(flat));
  }

  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  ConstVec operator[](std::size_t i) const { return ConstVec(data_).subspan(i * dim_, dim_); }
  const Provenance& provenance() const noexcept { return provenance_; }
  ConstVec flat() const noexcept { return data_; }

 private:
  std::size_t dim_;
  std::vector<double> data_;
  Provenance provenance_;
};

// N simulated chains S_h^(n), h = 0..H, all started at x0 under the
// representative controls b_0..b_{H-1}.
class TrajectoryMesh {
 public:
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  ConstVec start_state() const noexcept { return start_; }
  const std::vector<std::vector<double>>& representative_controls() const noexcept {
    return controls_;
  }

  ConstVec state(std::size_t n, std::size_t h) const {
    return ConstVec(states_).subspan((h * n_paths_ + n) * dim_, dim_);
  }
  // All N states at step h, row-major N x d.
  ConstVec step(std::size_t h) const {
    return ConstVec(states_).subspan(h * n_paths_ * dim_, n_paths_ * dim_);
  }

  // CSV dump: path,step,x0,...,x{d-1}
  void write_csv(std::ostream& out) const;

 private:
  friend TrajectoryMesh simulate_mesh(const MdpSpec&, const std::vector<std::vector<double>>&,
                                      const std::vector<double>&, std::size_t, std::uint64_t,
                                      unsigned);

  std::size_t n_paths_ = 0;
  std::size_t horizon_ = 0;
  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> start_;
  std::vector<std::vector<double>> controls_;
  std::vector<double> states_;  // [h][n][k]
};

// Path n draws step h from path_substream(seed, n, h).
inline TrajectoryMesh simulate_mesh(const MdpSpec& spec,
                                    const std::vector<std::vector<double>>& controls,
                                    const std::vector<double>& x0, std::size_t n_paths,
                                    std::uint64_t seed, unsigned workers = 1) {
  spec.validate();
  detail::require(controls.size() == spec.horizon,
                  "simulate_mesh: need one representative control per step");
  for (const auto& b : controls)
    detail::require(b.size() == spec.action_dim, "simulate_mesh: control dimension mismatch");
  detail::require(x0.size() == spec.state_dim, "simulate_mesh: x0 dimension mismatch");
  detail::require(n_paths > 0, "simulate_mesh: n_paths must be positive");

  TrajectoryMesh mesh;
  mesh.n_paths_ = n_paths;
  mesh.horizon_ = spec.horizon;
  mesh.dim_ = spec.state_dim;
  mesh.seed_ = seed;
  mesh.start_ = x0;
  mesh.controls_ = controls;
  const std::size_t d = spec.state_dim;
  mesh.states_.assign((spec.horizon + 1) * n_paths * d, 0.0);
  for (std::size_t n = 0; n < n_paths; ++n)
    std::copy(x0.begin(), x0.end(), mesh.states_.begin() + static_cast<std::ptrdiff_t>(n * d));

  const TransitionKernel& kernel = *spec.kernel;
  parallel_for(n_paths, workers, [&](std::size_t n) {
    for (std::size_t h = 0; h < spec.horizon; ++h) {
      Substream rng = path_substream(seed, n, h);
      const ConstVec from = ConstVec(mesh.states_).subspan((h * n_paths + n) * d, d);
      const std::span<double> to =
          std::span<double>(mesh.states_).subspan(((h + 1) * n_paths + n) * d, d);
      kernel.sample_into(h, from, controls[h], rng, to);
    }
  });
  return mesh;
}

// Zero representative controls for every step.
inline std::vector<std::vector<double>> zero_controls(const MdpSpec& spec) {
  return std::vector<std::vector<double>>(spec.horizon, std::vector<double>(spec.action_dim, 0.0));
}

// Greedy action index at each mesh point and step (N x H).
class PolicyTable {
 public:
  PolicyTable(std::size_t n_paths, std::size_t horizon, ActionSet actions)
      : n_paths_(n_paths), horizon_(horizon), choices_(n_paths * horizon, 0),
        actions_(std::move(actions)) {}

  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t horizon() const noexcept { return horizon_; }
  const ActionSet& action_set() const noexcept { return actions_; }

  std::size_t choice(std::size_t n, std::size_t h) const { return choices_[h * n_paths_ + n]; }
  void set_choice(std::size_t n, std::size_t h, std::size_t index) {
    detail::require(index < actions_.size(), "PolicyTable: action index out of range");
    choices_[h * n_paths_ + n] = index;
  }

 private:
  std::size_t n_paths_;
  std::size_t horizon_;
  std::vector<std::size_t> choices_;  // [h][n]
  ActionSet actions_;
};

}  // namespace meshmdp

#include "meshmdp/detail/csv.hpp"

namespace meshmdp {

inline void TrajectoryMesh::write_csv(std::ostream& out) const {
  out << "path,step";
  for (std::size_t k = 0; k < dim_; ++k) out << ",x" << k;
  out << '\n';
  for (std::size_t n = 0; n < n_paths_; ++n) {
    for (std::size_t h = 0; h <= horizon_; ++h) {
      out << n << ',' << h;
      for (double v : state(n, h)) out << ',' << csv::number(v);
      out << '\n';
    }
  }
}

}  // namespace meshmdp
