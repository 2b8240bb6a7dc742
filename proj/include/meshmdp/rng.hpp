#pragma once

// Counter-based random substreams.
//
// Every random draw in the library comes from a Substream keyed by a 64-bit
// value.  Keys are derived from the run's base seed by hashing a purpose tag
// and integer indices, so any piece of a computation (path n of a mesh at step
// h, repetition r of a table row, ...) can be regenerated independently of
// thread count or evaluation order.
//
// Splitting rule:
//   key(seed, w1, ..., wk) = fold(finalize(seed), w1, ..., wk)
//   fold(k, w)             = finalize(k ^ finalize(w + golden))
//   tag words are the FNV-1a hash of the purpose string.

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace meshmdp {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
constexpr std::uint64_t finalize64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fold_key(std::uint64_t key, std::uint64_t word) noexcept {
  return finalize64(key ^ finalize64(word + kGolden));
}

constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                                    std::uint64_t index) noexcept {
  return fold_key(fold_key(finalize64(base), tag_hash(purpose)), index);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                                    std::uint64_t i, std::uint64_t j) noexcept {
  return fold_key(derive_seed(base, purpose, i), j);
}

// A splitmix64 stream over a fixed key.  Satisfies UniformRandomBitGenerator.
class Substream {
 public:
  using result_type = std::uint64_t;

  explicit Substream(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += kGolden;
    return finalize64(state_);
  }

  double normal() { return normal_(*this); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(*this);
  }

 private:
  std::uint64_t state_;
  std::normal_distribution<double> normal_;
};

// Substream for path `path` at step `step` of a mesh built from `seed`.
inline Substream path_substream(std::uint64_t seed, std::uint64_t path,
                                std::uint64_t step) noexcept {
  return Substream(fold_key(fold_key(finalize64(seed), path), step));
}

}  // namespace meshmdp
