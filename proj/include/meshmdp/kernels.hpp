#pragma once

// Transition kernels p_h^a(y|x): log-density evaluators paired with samplers.
//
// Step convention: index h in [0, steps()) addresses the transition from
// S_h to S_{h+1}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "meshmdp/errors.hpp"
#include "meshmdp/numeric.hpp"
#include "meshmdp/rng.hpp"

namespace meshmdp {

using ConstVec = std::span<const double>;

// Constants of the density bounds (lower delta, upper Lambda, Lipschitz L).
struct KernelBounds {
  double delta = 0.0;
  double Lambda = 0.0;
  double lipschitz = 0.0;
};

class TransitionKernel {
 public:
  virtual ~TransitionKernel() = default;

  virtual std::size_t dim() const noexcept = 0;
  virtual std::size_t steps() const noexcept = 0;

  virtual double log_density(std::size_t h, ConstVec x, ConstVec a, ConstVec y) const = 0;

  // Draws S_{h+1} given S_h = x under action a into `out`.
  virtual void sample_into(std::size_t h, ConstVec x, ConstVec a, Substream& rng,
                           std::span<double> out) const = 0;

  std::vector<double> sample(std::size_t h, ConstVec x, ConstVec a, Substream& rng) const {
    std::vector<double> out(dim());
    sample_into(h, x, a, rng, out);
    return out;
  }

  // out[n] = log p_h^a(y_n | x) for the rows y_n of the row-major block `ys`.
  virtual void log_density_targets(std::size_t h, ConstVec x, ConstVec a, ConstVec ys,
                                   std::span<double> out) const {
    const std::size_t d = dim();
    for (std::size_t n = 0; n < out.size(); ++n)
      out[n] = log_density(h, x, a, ys.subspan(n * d, d));
  }

  // out[k] = log p_h^a(y | x_k) for the rows x_k of the row-major block `xs`.
  virtual void log_density_sources(std::size_t h, ConstVec xs, ConstVec a, ConstVec y,
                                   std::span<double> out) const {
    const std::size_t d = dim();
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = log_density(h, xs.subspan(k * d, d), a, y);
  }

  virtual std::optional<KernelBounds> declared_bounds() const { return std::nullopt; }
};

namespace detail {

inline void check_dim(ConstVec v, std::size_t d, const char* what) {
  if (v.size() != d)
    throw InvalidArgument(std::string(what) + ": expected dimension " + std::to_string(d) +
                          ", got " + std::to_string(v.size()));
}

inline double squared_norm(ConstVec v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return s;
}

inline double log_ball_volume(std::size_t d, double radius) {
  const double half = 0.5 * static_cast<double>(d);
  return half * std::log(std::numbers::pi) + static_cast<double>(d) * std::log(radius) -
         std::lgamma(half + 1.0);
}

}  // namespace detail

// p_h^a(y|x) = (2 pi sigma_h^2)^{-d/2} exp(-|x + a - y|^2 / (2 sigma_h^2))
class GaussianShiftKernel final : public TransitionKernel {
 public:
  GaussianShiftKernel(std::vector<double> sigmas, std::size_t dim)
      : sigmas_(std::move(sigmas)), dim_(dim) {
    detail::require(dim_ >= 1, "GaussianShiftKernel: dim must be >= 1");
    detail::require(!sigmas_.empty(), "GaussianShiftKernel: need at least one step");
    log_norm_.reserve(sigmas_.size());
    inv_two_var_.reserve(sigmas_.size());
    for (double s : sigmas_) {
      detail::require(std::isfinite(s) && s > 0.0,
                      "GaussianShiftKernel: sigmas must be positive and finite");
      log_norm_.push_back(-0.5 * static_cast<double>(dim_) *
                          std::log(2.0 * std::numbers::pi * s * s));
      inv_two_var_.push_back(0.5 / (s * s));
    }
  }

  // Same sigma for every step.
  static GaussianShiftKernel uniform(double sigma, std::size_t steps, std::size_t dim) {
    return GaussianShiftKernel(std::vector<double>(steps, sigma), dim);
  }

  std::size_t dim() const noexcept override { return dim_; }
  std::size_t steps() const noexcept override { return sigmas_.size(); }

  double sigma(std::size_t h) const { return sigmas_.at(h); }
  const std::vector<double>& sigmas() const noexcept { return sigmas_; }
  double sigma_min() const { return *std::min_element(sigmas_.begin(), sigmas_.end()); }
  double sigma_max() const { return *std::max_element(sigmas_.begin(), sigmas_.end()); }

  double log_density(std::size_t h, ConstVec x, ConstVec a, ConstVec y) const override {
    check(h, x, a);
    detail::check_dim(y, dim_, "gaussian log_density y");
    double q = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double r = x[k] + a[k] - y[k];
      q += r * r;
    }
    return log_norm_[h] - q * inv_two_var_[h];
  }

  void sample_into(std::size_t h, ConstVec x, ConstVec a, Substream& rng,
                   std::span<double> out) const override {
    check(h, x, a);
    detail::check_dim(out, dim_, "gaussian sample out");
    const double s = sigmas_[h];
    for (std::size_t k = 0; k < dim_; ++k) out[k] = x[k] + a[k] + s * rng.normal();
  }

  void log_density_targets(std::size_t h, ConstVec x, ConstVec a, ConstVec ys,
                           std::span<double> out) const override {
    check(h, x, a);
    detail::require(ys.size() == out.size() * dim_, "log_density_targets: size mismatch");
    const double c = log_norm_[h];
    const double w = inv_two_var_[h];
    if (dim_ == 1) {
      const double m = x[0] + a[0];
      for (std::size_t n = 0; n < out.size(); ++n) {
        const double r = m - ys[n];
        out[n] = c - r * r * w;
      }
      return;
    }
    double mean[16];
    std::vector<double> mean_heap;
    double* m = mean;
    if (dim_ > 16) {
      mean_heap.resize(dim_);
      m = mean_heap.data();
    }
    for (std::size_t k = 0; k < dim_; ++k) m[k] = x[k] + a[k];
    for (std::size_t n = 0; n < out.size(); ++n) {
      const double* y = ys.data() + n * dim_;
      double q = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        const double r = m[k] - y[k];
        q += r * r;
      }
      out[n] = c - q * w;
    }
  }

  void log_density_sources(std::size_t h, ConstVec xs, ConstVec a, ConstVec y,
                           std::span<double> out) const override {
    detail::require(h < sigmas_.size(), "gaussian kernel: step out of range");
    detail::check_dim(a, dim_, "gaussian action");
    detail::check_dim(y, dim_, "gaussian y");
    detail::require(xs.size() == out.size() * dim_, "log_density_sources: size mismatch");
    const double c = log_norm_[h];
    const double w = inv_two_var_[h];
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double* x = xs.data() + k * dim_;
      double q = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) {
        const double r = x[j] + a[j] - y[j];
        q += r * r;
      }
      out[k] = c - q * w;
    }
  }

 private:
  void check(std::size_t h, ConstVec x, ConstVec a) const {
    detail::require(h < sigmas_.size(), "gaussian kernel: step out of range");
    detail::check_dim(x, dim_, "gaussian x");
    detail::check_dim(a, dim_, "gaussian action");
  }

  std::vector<double> sigmas_;
  std::size_t dim_;
  std::vector<double> log_norm_;
  std::vector<double> inv_two_var_;
};

// P(|Y| > R) for Y ~ N(mu, sigma^2 I_d) with |mu| = mean_norm: the survival
// function of a noncentral chi-square with d degrees of freedom and
// noncentrality mean_norm^2/sigma^2, evaluated at R^2/sigma^2.  Poisson
// mixture of central chi-square tails, summed outward from the Poisson mode.
inline double ball_tail_mass(double mean_norm, double sigma, double radius, std::size_t d) {
  detail::require(radius > 0.0, "ball_tail_mass: radius must be positive");
  detail::require(sigma > 0.0, "ball_tail_mass: sigma must be positive");
  detail::require(d >= 1, "ball_tail_mass: dimension must be >= 1");
  detail::require(mean_norm >= 0.0 && std::isfinite(mean_norm),
                  "ball_tail_mass: mean_norm must be finite and nonnegative");
  if (std::isinf(radius)) return 0.0;

  const double x = (radius / sigma) * (radius / sigma);
  const double half_nc = 0.5 * (mean_norm / sigma) * (mean_norm / sigma);
  const double half_df = 0.5 * static_cast<double>(d);

  if (d > 200) {
    // Normal approximation to the noncentral chi-square.
    const double nc = 2.0 * half_nc;
    const double mean = static_cast<double>(d) + nc;
    const double sd = std::sqrt(2.0 * (static_cast<double>(d) + 2.0 * nc));
    return 0.5 * boost::math::erfc((x - mean) / (sd * std::numbers::sqrt2));
  }

  if (half_nc == 0.0) return boost::math::gamma_q(half_df, 0.5 * x);

  constexpr double kCutoff = 1e-14;
  constexpr int kMaxTerms = 1'000'000;
  const auto log_poisson = [half_nc](double j) {
    return -half_nc + j * std::log(half_nc) - std::lgamma(j + 1.0);
  };
  const double mode = std::floor(half_nc);

  double total = 0.0;
  int terms = 0;
  // Upward from the mode; Poisson weights decay geometrically past the mode.
  for (double j = mode;; j += 1.0) {
    const double w = std::exp(log_poisson(j));
    total += w * boost::math::gamma_q(half_df + j, 0.5 * x);
    // ratio < 1 for j >= mode
    const double ratio = half_nc / (j + 1.0);
    if (w * ratio / (1.0 - ratio) < kCutoff) break;
    if (++terms > kMaxTerms)
      throw NumericError("ball_tail_mass: series did not converge (upward), noncentrality=" +
                         std::to_string(2.0 * half_nc) + " x=" + std::to_string(x));
  }
  // Downward.
  for (double j = mode - 1.0; j >= 0.0; j -= 1.0) {
    const double w = std::exp(log_poisson(j));
    total += w * boost::math::gamma_q(half_df + j, 0.5 * x);
    const double ratio = j / half_nc;
    if (w * ratio / (1.0 - ratio) < kCutoff) break;
    if (++terms > kMaxTerms)
      throw NumericError("ball_tail_mass: series did not converge (downward), noncentrality=" +
                         std::to_string(2.0 * half_nc) + " x=" + std::to_string(x));
  }
  return std::clamp(total, 0.0, 1.0);
}

// Chain confined to the ball B_R: any transition that would leave the ball is
// replaced by a uniform draw from it.  Density on B_R x B_R:
//   p^D(y|x) = p(y|x) + P(exit | x, a) / vol(B_R).
class ReflectedKernel final : public TransitionKernel {
 public:
  ReflectedKernel(std::shared_ptr<const GaussianShiftKernel> inner, double radius)
      : inner_(std::move(inner)), radius_(radius) {
    detail::require(inner_ != nullptr, "ReflectedKernel: inner kernel is null");
    detail::require(radius_ > 0.0, "ReflectedKernel: radius must be positive");
    log_volume_ = std::isinf(radius_) ? std::numeric_limits<double>::infinity()
                                      : detail::log_ball_volume(inner_->dim(), radius_);
  }

  std::size_t dim() const noexcept override { return inner_->dim(); }
  std::size_t steps() const noexcept override { return inner_->steps(); }
  double radius() const noexcept { return radius_; }
  const GaussianShiftKernel& inner() const noexcept { return *inner_; }

  bool contains(ConstVec v) const { return detail::squared_norm(v) <= radius_ * radius_; }

  double exit_probability(std::size_t h, ConstVec x, ConstVec a) const {
    detail::check_dim(x, dim(), "reflected x");
    detail::check_dim(a, dim(), "reflected action");
    double s = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) s += (x[k] + a[k]) * (x[k] + a[k]);
    return ball_tail_mass(std::sqrt(s), inner_->sigma(h), radius_, dim());
  }

  double log_density(std::size_t h, ConstVec x, ConstVec a, ConstVec y) const override {
    detail::check_dim(y, dim(), "reflected y");
    if (!contains(x)) throw DomainError("reflected log_density: x outside the domain ball");
    if (!contains(y)) throw DomainError("reflected log_density: y outside the domain ball");
    const double inner = inner_->log_density(h, x, a, y);
    const double tail = exit_probability(h, x, a);
    if (tail == 0.0) return inner;
    return log_add_exp(inner, std::log(tail) - log_volume_);
  }

  void sample_into(std::size_t h, ConstVec x, ConstVec a, Substream& rng,
                   std::span<double> out) const override {
    if (!contains(x)) throw DomainError("reflected sample: x outside the domain ball");
    inner_->sample_into(h, x, a, rng, out);
    if (contains(out)) return;
    uniform_in_ball(rng, out);
  }

 private:
  void uniform_in_ball(Substream& rng, std::span<double> out) const {
    const std::size_t d = dim();
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        out[k] = rng.normal();
        norm2 += out[k] * out[k];
      }
    } while (norm2 == 0.0);
    const double r = radius_ * std::pow(rng.uniform(0.0, 1.0), 1.0 / static_cast<double>(d));
    const double scale = r / std::sqrt(norm2);
    for (std::size_t k = 0; k < d; ++k) out[k] *= scale;
  }

  std::shared_ptr<const GaussianShiftKernel> inner_;
  double radius_;
  double log_volume_;
};

// Radius schedule and density bounds for the Gaussian family on the ball
// D_N = B_{R_N}, with actions in the ball of radius A.  Informational only.
struct KernelDiagnostics {
  double R_N = 0.0;
  double delta_D = 0.0;
  double Lambda = 0.0;
  double lipschitz = 0.0;        // sup-norm bound on L_{D_N}
  double tail_mass_bound = 0.0;  // worst exit probability from D_N
};

inline KernelDiagnostics diagnostics_for_schedule(const GaussianShiftKernel& kernel,
                                                  double action_radius, std::size_t n_paths,
                                                  double gamma) {
  if (!(gamma > 0.0 && gamma < 0.25))
    throw InvalidArgument("diagnostics_for_schedule: gamma must lie in (0, 1/4)");
  detail::require(n_paths >= 2, "diagnostics_for_schedule: N must be >= 2");
  detail::require(action_radius >= 0.0, "diagnostics_for_schedule: A must be nonnegative");

  const double d = static_cast<double>(kernel.dim());
  const double s_min = kernel.sigma_min();
  const double s_max = kernel.sigma_max();
  const double two_pi = 2.0 * std::numbers::pi;
  KernelDiagnostics out;
  out.R_N = std::sqrt(gamma * s_min * s_min * std::log(static_cast<double>(n_paths)) / 4.0);
  out.delta_D = std::pow(two_pi * s_max * s_max, -0.5 * d) *
                std::exp(-action_radius * action_radius / (s_min * s_min)) *
                std::pow(static_cast<double>(n_paths), -gamma);
  out.Lambda = std::pow(two_pi * s_min * s_min, -0.5 * d);
  out.lipschitz = std::numbers::sqrt2 / (std::pow(s_min, d + 2.0) * std::pow(two_pi, 0.5 * d)) *
                  (2.0 * out.R_N + action_radius);
  for (double s : {s_min, s_max})
    out.tail_mass_bound = std::max(
        out.tail_mass_bound, ball_tail_mass(out.R_N + action_radius, s, out.R_N, kernel.dim()));
  return out;
}

}  // namespace meshmdp
