#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "meshmdp/errors.hpp"

namespace meshmdp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

namespace detail {

// Four interleaved partial sums in a fixed order, so the result does not
// depend on how the buffer happens to be aligned (Eigen's redux does).
inline double ordered_sum(const double* v, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += v[i];
    s1 += v[i + 1];
    s2 += v[i + 2];
    s3 += v[i + 3];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += v[i];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

// sum_i a[i] (b[i] - c)
inline double ordered_centered_dot(const double* a, const double* b, double c, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * (b[i] - c);
    s1 += a[i + 1] * (b[i + 1] - c);
    s2 += a[i + 2] * (b[i + 2] - c);
    s3 += a[i + 3] * (b[i + 3] - c);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * (b[i] - c);
  return ((s0 + s1) + (s2 + s3)) + tail;
}

// exp(t - shift) into a max-aligned per-thread buffer.  Eigen peels unaligned
// heads with scalar exp, which differs from the packet exp in the last bit.
inline std::span<const double> shifted_exp(std::span<const double> t, double shift) {
  thread_local std::vector<double, Eigen::aligned_allocator<double>> buf;
  buf.resize(t.size());
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::Map<Eigen::ArrayXd, Eigen::AlignedMax>(buf.data(), n) =
      (Eigen::Map<const Eigen::ArrayXd>(t.data(), n) - shift).exp();
  return {buf.data(), buf.size()};
}

}  // namespace detail

// log(sum_i exp(terms[i])) with max shift.  Returns -inf for an empty span or
// when every term is -inf.
inline double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) return kNegInf;
  const Eigen::Map<const Eigen::ArrayXd> t(terms.data(), static_cast<Eigen::Index>(terms.size()));
  const double top = t.maxCoeff();
  if (top == kNegInf) return kNegInf;
  if (!std::isfinite(top)) throw NumericError("log_sum_exp: non-finite term");
  const auto e = detail::shifted_exp(terms, top);
  return top + std::log(detail::ordered_sum(e.data(), e.size()));
}

inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double top = std::fmax(a, b);
  return top + std::log1p(std::exp(-std::fabs(a - b)));
}

struct SelfNormalizedMean {
  double value = 0.0;
  double log_normalizer = kNegInf;  // log sum_n exp(log_terms[n])
  bool degenerate = true;           // every term was zero
};

// Self-normalized average of f with unnormalized log-weights, overwriting
// `log_terms` with exp(log_terms - max).  The all-zero case returns value 0
// and sets `degenerate` (0/0 = 0).
inline SelfNormalizedMean self_normalized_mean_inplace(std::span<double> log_terms,
                                                       std::span<const double> f) {
  if (log_terms.empty()) return {};
  const auto n = static_cast<Eigen::Index>(log_terms.size());
  Eigen::Map<Eigen::ArrayXd> t(log_terms.data(), n);
  const double top = t.maxCoeff();
  if (top == kNegInf) return {};
  if (!std::isfinite(top)) throw NumericError("self_normalized_mean: non-finite log-weight");
  const auto e = detail::shifted_exp(log_terms, top);
  std::copy(e.begin(), e.end(), log_terms.begin());
  const double mass = detail::ordered_sum(e.data(), e.size());
  // centred on f[0] so a constant f comes back exactly
  const double acc = detail::ordered_centered_dot(e.data(), f.data(), f[0], e.size());
  return {f[0] + acc / mass, top + std::log(mass), false};
}

inline SelfNormalizedMean self_normalized_mean(std::span<const double> log_terms,
                                               std::span<const double> f) {
  std::vector<double> scratch(log_terms.begin(), log_terms.end());
  return self_normalized_mean_inplace(scratch, f);
}

}  // namespace meshmdp
