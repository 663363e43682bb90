// Counter-based deterministic randomness for reproducible parallel runs.
//
// Every random decision in the library flows through SplitMix64 streams whose
// seeds are derived from (root seed, node id, trial index).  Results are
// therefore bitwise identical regardless of worker count or scheduling.
#pragma once

#include <cmath>
#include <cstdint>

namespace privrec {

// SplitMix64 finalizer (Steele, Lea, Flood; public-domain reference constants).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A tiny counter-based generator: the k-th output is a pure function of
// (seed, k), so streams can be split and replayed freely.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double strictly inside (0, 1): safe as a log/CDF argument.
  double next_unit_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) without modulo bias beyond 2^-64 scale
  // (Lemire reduction).
  std::uint64_t next_below(std::uint64_t bound) {
    using u128 = unsigned __int128;
    return static_cast<std::uint64_t>(
        (static_cast<u128>(next()) * static_cast<u128>(bound)) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Independent stream per (root seed, node, trial); the double-mix decorrelates
// structured inputs such as consecutive node ids.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t node,
                                 std::uint64_t trial) {
  return mix64(mix64(root ^ 0xa0761d6478bd642fULL) ^
               mix64(node * 0xe7037ed1a0b428dbULL + 0x8ebc6af09c88c6e3ULL) ^
               mix64(trial * 0x589965cc75374cc3ULL + 0x1d8e4e27c47d124fULL));
}

// Inverse CDF of the Laplace(0, scale) distribution at u in (0, 1).
inline double laplace_inv_cdf(double u, double scale) {
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

// Inverse CDF of the maximum of `count` i.i.d. Laplace(0, scale) variables:
// F_max(x) = F(x)^count, so x = F^{-1}(u^{1/count}).  Computed through
// log-space (expm1) so the upper tail keeps full precision even for huge
// counts, where u^{1/count} is indistinguishable from 1 in double arithmetic.
inline double laplace_max_inv_cdf(double u, double scale, std::uint64_t count) {
  const double log_p = std::log(u) / static_cast<double>(count);  // log F(x)
  // F(x) = 1/2 e^{x/b} for x <= 0;  F(x) = 1 - 1/2 e^{-x/b} for x >= 0.
  if (log_p < -0.6931471805599453094) {        // F(x) < 1/2  ->  x < 0
    return scale * (log_p + 0.6931471805599453094);
  }
  const double one_minus_p = -std::expm1(log_p);  // exact 1 - F(x)
  return -scale * std::log(2.0 * one_minus_p);
}

}  // namespace privrec
