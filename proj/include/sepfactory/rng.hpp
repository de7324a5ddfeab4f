#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "sepfactory/types.hpp"

namespace sepfactory {

/// xorshift64* (shifts 12, 25, 27; multiplier 0x2545F4914F6CDD1D), seeded
/// through one splitmix64 step so that seed 0 is usable.
///
/// Distributions are implemented here rather than taken from <random> so
/// that a given seed yields the same stream on every standard library:
///   uniform()  = (next() >> 11) * 2^-53          in [0, 1)
///   normal()   = Box-Muller on two uniforms, cosine branch only
///   cnormal()  = (normal() + i normal()) / sqrt(2)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  cplx cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2, im * std::numbers::sqrt2 / 2};
  }

  /// Ginibre matrix: i.i.d. standard complex Gaussian entries, filled row by row.
  cmat ginibre(Index rows, Index cols) {
    cmat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }

  cvec unit_vector(Index n) {
    cvec v(n);
    for (Index i = 0; i < n; ++i) v(i) = cnormal();
    const double nrm = v.norm();
    if (nrm == 0) {
      v.setZero();
      v(0) = 1;
      return v;
    }
    return v / nrm;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
};

}  // namespace sepfactory
