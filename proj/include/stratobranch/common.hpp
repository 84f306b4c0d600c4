// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratobranch {

using Real = double;

inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Solver tolerances. All downstream modules reference these names.
struct Tolerances {
  Real feas_tol = 1e-7;    // primal feasibility
  Real opt_tol = 1e-9;     // reduced-cost optimality
  Real int_tol = 1e-6;     // integrality
};

inline constexpr Tolerances kDefaultTol{};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// 64-bit FNV-1a. Used to fingerprint configs and artifact files (not cryptographic).
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// Seeded random stream with fixed-algorithm draws. <random> distributions are
// implementation-defined, so the scalar draws are pinned here to keep every
// pipeline stage bit-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw Error("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % span);
  }

  // Uniform in [0, 1) with 53 random bits.
  Real uniform01() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

  Real uniform_real(Real a, Real b) { return a + uniform01() * (b - a); }

  bool bernoulli(Real p) { return uniform01() < p; }

  // Standard normal via Box-Muller; the paired draw is cached.
  Real normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    Real u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const Real u2 = uniform01();
    const Real mag = std::sqrt(-2.0 * std::log(u1));
    constexpr Real kTwoPi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return mag * std::cos(kTwoPi * u2);
  }

  // Fisher-Yates over [0, n); returns the permutation.
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(uniform_int(0, i));
      std::swap(p[i], p[j]);
    }
    return p;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  Real spare_ = 0.0;
};

}  // namespace stratobranch
