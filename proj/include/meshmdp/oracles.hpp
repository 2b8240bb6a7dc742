#pragma once

// Independent references for the mesh solver:
//  * the Cole-Hopf closed form of the continuous-time LQG value, by Monte Carlo;
//  * a deterministic grid dynamic program for one-dimensional Gaussian-shift MDPs;
//  * the large-N consistency of the mesh weights against direct quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "meshmdp/errors.hpp"
#include "meshmdp/kernels.hpp"
#include "meshmdp/mdp.hpp"
#include "meshmdp/numeric.hpp"
#include "meshmdp/parallel.hpp"
#include "meshmdp/rng.hpp"
#include "meshmdp/solver.hpp"

namespace meshmdp {

enum class OracleMethod { closed_form_mc, grid_dp, quadrature };

inline const char* to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::closed_form_mc: return "closed_form_mc";
    case OracleMethod::grid_dp: return "grid_dp";
    case OracleMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for deterministic methods
  std::size_t n_samples = 0;
  OracleMethod method = OracleMethod::closed_form_mc;
  double refinement_error = 0.0;  // grid_dp only
};

// ---------------------------------------------------------------------------
// Closed form: J_t(x) = (1/lambda) log E[exp(lambda F(x + sqrt(2 (T - t)) Z))]

// (1/lambda) log mean exp(lambda F_i) with a delta-method standard error.
inline OracleEstimate closed_form_from_terminal_values(std::span<const double> terminal_values,
                                                       double lambda) {
  detail::require(lambda > 0.0, "closed form: lambda must be positive");
  detail::require(!terminal_values.empty(), "closed form: need at least one sample");
  const std::size_t n = terminal_values.size();
  double top = kNegInf;
  for (double f : terminal_values) top = std::fmax(top, lambda * f);
  if (!std::isfinite(top)) throw NumericError("closed form: non-finite lambda * F");

  double mean = 0.0;
  for (double f : terminal_values) mean += std::exp(lambda * f - top);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double f : terminal_values) {
    const double e = std::exp(lambda * f - top) - mean;
    ss += e * e;
  }
  OracleEstimate out;
  out.method = OracleMethod::closed_form_mc;
  out.n_samples = n;
  out.value = (top + std::log(mean)) / lambda;
  if (n > 1) {
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.std_error = sd / (std::sqrt(static_cast<double>(n)) * mean) / lambda;
  }
  if (!std::isfinite(out.value) || !std::isfinite(out.std_error))
    throw NumericError("closed form: non-finite estimate");
  return out;
}

// Sample i is drawn from Substream(derive_seed(seed, "closed-form", i)).
inline OracleEstimate lqg_closed_form(ConstVec x, double t, double lambda, double horizon_time,
                                      const TerminalFn& terminal, std::size_t n_samples,
                                      std::uint64_t seed, unsigned workers = 1) {
  detail::require(lambda > 0.0, "lqg_closed_form: lambda must be positive");
  detail::require(0.0 <= t && t <= horizon_time, "lqg_closed_form: need 0 <= t <= T");
  detail::require(n_samples >= 1, "lqg_closed_form: need at least one sample");
  if (t == horizon_time) {
    OracleEstimate out;
    out.value = terminal(x);
    out.n_samples = n_samples;
    return out;
  }
  const double scale = std::sqrt(2.0 * (horizon_time - t));
  std::vector<double> f(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    Substream rng(derive_seed(seed, "closed-form", i));
    std::vector<double> y(x.begin(), x.end());
    for (double& c : y) c += scale * rng.normal();
    f[i] = terminal(y);
  });
  return closed_form_from_terminal_values(f, lambda);
}

// ---------------------------------------------------------------------------
// Gauss-Hermite rule for E[g(Z)], Z ~ N(0, 1) (Golub-Welsch).

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1
};

inline QuadratureRule gauss_hermite(std::size_t n) {
  detail::require(n >= 1, "gauss_hermite: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
    jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    rule.nodes[k] = eig.eigenvalues()(i);
    const double v = eig.eigenvectors()(0, i);
    rule.weights[k] = v * v;
    total += rule.weights[k];
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

// ---------------------------------------------------------------------------
// Grid dynamic program, d = 1, Gaussian shift kernel:
//   V_h(x) = max_a ( R_h(x, a) + E[V_{h+1}(x + a + sigma_h Z)] ),  V_H = F.

struct GridOptions {
  double halfwidth = 0.0;   // 0: 6 sqrt(sum sigma^2) + H max|a| + 4 sigma_max
  double step = 0.0;        // 0: sigma_min / 4
  std::size_t quadrature_nodes = 64;
  double tolerance = std::numeric_limits<double>::infinity();
  unsigned workers = 1;
};

namespace detail {

inline const GaussianShiftKernel& require_scalar_gaussian(const MdpSpec& spec) {
  spec.validate();
  const auto* kernel = dynamic_cast<const GaussianShiftKernel*>(spec.kernel.get());
  detail::require(kernel != nullptr, "grid_dp: kernel must be a GaussianShiftKernel");
  detail::require(spec.state_dim == 1 && spec.action_dim == 1, "grid_dp: only d = 1 is supported");
  return *kernel;
}

class UniformGrid {
 public:
  UniformGrid(double lo, double step, std::size_t n) : lo_(lo), step_(step), n_(n) {}

  std::size_t size() const noexcept { return n_; }
  double node(std::size_t i) const noexcept { return lo_ + step_ * static_cast<double>(i); }

  // Piecewise-linear interpolation, constant beyond the ends.
  double interpolate(std::span<const double> v, double x) const noexcept {
    const double s = (x - lo_) / step_;
    if (s <= 0.0) return v[0];
    if (s >= static_cast<double>(n_ - 1)) return v[n_ - 1];
    const auto i = static_cast<std::size_t>(s);
    const double frac = s - static_cast<double>(i);
    return v[i] + frac * (v[i + 1] - v[i]);
  }

 private:
  double lo_;
  double step_;
  std::size_t n_;
};

inline double grid_dp_pass(const MdpSpec& spec, const GaussianShiftKernel& kernel, double x0,
                           const ActionSet& actions, double halfwidth, double step,
                           const QuadratureRule& rule, unsigned workers) {
  const auto half_count = static_cast<std::size_t>(std::ceil(halfwidth / step));
  const UniformGrid grid(x0 - static_cast<double>(half_count) * step, step, 2 * half_count + 1);
  std::vector<double> value(grid.size());
  std::vector<double> next(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    value[i] = spec.terminal(ConstVec(&x, 1));
  }
  for (std::size_t h = spec.horizon; h-- > 0;) {
    const double sigma = kernel.sigma(h);
    parallel_for(grid.size(), workers, [&](std::size_t i) {
      const double x = grid.node(i);
      double best = kNegInf;
      for (std::size_t j = 0; j < actions.size(); ++j) {
        const double a = actions[j][0];
        double expectation = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
          expectation += rule.weights[q] * grid.interpolate(value, x + a + sigma * rule.nodes[q]);
        const double candidate = spec.reward(h, ConstVec(&x, 1), actions[j]) + expectation;
        if (candidate > best || j == 0) best = candidate;
      }
      next[i] = best;
    });
    value.swap(next);
  }
  return grid.interpolate(value, x0);
}

}  // namespace detail

// Runs the program at grid steps s and s/2 and reports the fine value with the
// Richardson estimate |V(s/2) - V(s)| / 3 of its interpolation error.
inline OracleEstimate grid_dp(const MdpSpec& spec, double x0, const ActionSet& actions,
                              const GridOptions& options = {}) {
  const GaussianShiftKernel& kernel = detail::require_scalar_gaussian(spec);
  detail::require(actions.dim() == 1, "grid_dp: actions must be one-dimensional");

  double max_action = 0.0;
  for (std::size_t j = 0; j < actions.size(); ++j)
    max_action = std::fmax(max_action, std::fabs(actions[j][0]));
  double total_var = 0.0;
  for (std::size_t h = 0; h < spec.horizon; ++h) total_var += kernel.sigma(h) * kernel.sigma(h);
  const double min_halfwidth =
      6.0 * std::sqrt(total_var) + static_cast<double>(spec.horizon) * max_action;
  const double max_step = kernel.sigma_min() / 4.0;

  const double halfwidth =
      options.halfwidth > 0.0 ? options.halfwidth : min_halfwidth + 4.0 * kernel.sigma_max();
  const double step = options.step > 0.0 ? options.step : max_step;
  detail::require(halfwidth >= min_halfwidth,
                  "grid_dp: grid must span x0 +- (6 sqrt(sum sigma^2) + H max|a|)");
  detail::require(step <= max_step * (1.0 + 1e-12), "grid_dp: grid step must be <= sigma_min / 4");
  detail::require(options.quadrature_nodes >= 2, "grid_dp: need at least 2 quadrature nodes");

  const QuadratureRule rule = gauss_hermite(options.quadrature_nodes);
  const double coarse =
      detail::grid_dp_pass(spec, kernel, x0, actions, halfwidth, step, rule, options.workers);
  const double fine =
      detail::grid_dp_pass(spec, kernel, x0, actions, halfwidth, step / 2.0, rule, options.workers);

  OracleEstimate out;
  out.method = OracleMethod::grid_dp;
  out.value = fine;
  out.refinement_error = std::fabs(fine - coarse) / 3.0;
  if (!std::isfinite(out.value)) throw NumericError("grid_dp: non-finite value");
  if (out.refinement_error > options.tolerance)
    throw AccuracyError("grid_dp: refinement error " + std::to_string(out.refinement_error) +
                        " exceeds tolerance " + std::to_string(options.tolerance));
  return out;
}

// ---------------------------------------------------------------------------
// Weight consistency: E_{h,N}(x, a; f) -> integral f(z) p_h^a(z|x) dz.

// Integral of f against the one-dimensional density p_h^a(.|x) on `window`.
inline double kernel_expectation_1d(const TransitionKernel& kernel, std::size_t h, double x,
                                    double a, const std::function<double(double)>& f,
                                    std::pair<double, double> window) {
  detail::require(kernel.dim() == 1, "kernel_expectation_1d: kernel must be one-dimensional");
  const auto integrand = [&](double z) {
    return f(z) * std::exp(kernel.log_density(h, ConstVec(&x, 1), ConstVec(&a, 1), ConstVec(&z, 1)));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, window.first,
                                                                       window.second, 15, 1e-13);
}

// Integration window covering the support (reflected) or +-12 sigma (Gaussian).
inline std::pair<double, double> default_window(const TransitionKernel& kernel, std::size_t h,
                                                double x, double a) {
  if (const auto* g = dynamic_cast<const GaussianShiftKernel*>(&kernel))
    return {x + a - 12.0 * g->sigma(h), x + a + 12.0 * g->sigma(h)};
  if (const auto* r = dynamic_cast<const ReflectedKernel*>(&kernel))
    return {-r->radius(), r->radius()};
  throw InvalidArgument("default_window: unsupported kernel type");
}

struct ConsistencyPoint {
  std::size_t n_paths = 0;
  double mesh_value = 0.0;
  double target = 0.0;
  double abs_error = 0.0;
  double weight_mass = 0.0;    // unnormalized sum; limit N / (N - 1)
  double expected_mass = 0.0;  // N / (N - 1)
  double mass_rel_deviation = 0.0;
};

// One fresh mesh per N, seeded with derive_seed(seed, "consistency", N).
inline std::vector<ConsistencyPoint> weight_consistency_curve(
    const MdpSpec& spec, const std::vector<double>& x0, const std::vector<std::size_t>& mesh_sizes,
    double x, double a, std::size_t h, const std::function<double(double)>& f, std::uint64_t seed,
    unsigned workers = 1) {
  spec.validate();
  detail::require(spec.state_dim == 1 && spec.action_dim == 1,
                  "weight_consistency_curve: only d = 1 is supported");
  detail::require(h < spec.horizon, "weight_consistency_curve: step out of range");
  const TransitionKernel& kernel = *spec.kernel;
  const double target = kernel_expectation_1d(kernel, h, x, a, f, default_window(kernel, h, x, a));

  std::vector<ConsistencyPoint> out;
  for (std::size_t n_paths : mesh_sizes) {
    detail::require(n_paths >= 2, "weight_consistency_curve: N must be >= 2");
    const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), x0, n_paths,
                                              derive_seed(seed, "consistency", n_paths), workers);
    const DenominatorTable denoms = precompute_denominators(mesh, kernel, h, workers);
    std::vector<double> f_values(n_paths);
    for (std::size_t n = 0; n < n_paths; ++n) f_values[n] = f(mesh.state(n, h + 1)[0]);
    ConsistencyPoint p;
    p.n_paths = n_paths;
    p.target = target;
    p.mesh_value =
        mesh_expectation(ConstVec(&x, 1), ConstVec(&a, 1), h, f_values, mesh, kernel, denoms).value;
    p.abs_error = std::fabs(p.mesh_value - target);
    p.weight_mass = unnormalized_weight_mass(ConstVec(&x, 1), ConstVec(&a, 1), h, mesh, kernel, denoms);
    p.expected_mass = static_cast<double>(n_paths) / static_cast<double>(n_paths - 1);
    p.mass_rel_deviation = std::fabs(p.weight_mass / p.expected_mass - 1.0);
    out.push_back(p);
  }
  return out;
}

struct ConsistencySummary {
  std::size_t n_paths = 0;
  double median_abs_error = 0.0;
  double median_weight_mass = 0.0;
  double expected_mass = 0.0;
  double median_mass_rel_deviation = 0.0;
};

inline double median(std::vector<double> v) {
  detail::require(!v.empty(), "median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Medians over `replications` curves seeded derive_seed(seed, "consistency-rep", r).
inline std::vector<ConsistencySummary> weight_consistency_study(
    const MdpSpec& spec, const std::vector<double>& x0, const std::vector<std::size_t>& mesh_sizes,
    double x, double a, std::size_t h, const std::function<double(double)>& f, std::uint64_t seed,
    std::size_t replications, unsigned workers = 1) {
  detail::require(replications >= 1, "weight_consistency_study: need at least one replication");
  std::vector<std::vector<ConsistencyPoint>> curves;
  for (std::size_t r = 0; r < replications; ++r)
    curves.push_back(weight_consistency_curve(spec, x0, mesh_sizes, x, a, h, f,
                                              derive_seed(seed, "consistency-rep", r), workers));
  std::vector<ConsistencySummary> out;
  for (std::size_t i = 0; i < mesh_sizes.size(); ++i) {
    std::vector<double> err, mass, dev;
    for (const auto& c : curves) {
      err.push_back(c[i].abs_error);
      mass.push_back(c[i].weight_mass);
      dev.push_back(c[i].mass_rel_deviation);
    }
    out.push_back({mesh_sizes[i], median(err), median(mass), curves[0][i].expected_mass, median(dev)});
  }
  return out;
}

}  // namespace meshmdp
