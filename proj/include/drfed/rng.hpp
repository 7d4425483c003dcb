#pragma once

// Deterministic random number streams for reproducible simulations.
//
// Core generator is xoshiro256++ seeded through splitmix64, following the
// public-domain reference implementations by David Blackman and Sebastiano
// Vigna (https://prng.di.unimi.it/). We keep our own copy instead of using
// <random> engines because the C++ standard does not pin down engine/
// distribution outputs across library implementations, and every simulation
// result here must be bit-reproducible from a 64-bit seed.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace drfed {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

/// One splitmix64 step: advances `state` and returns the next output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += kGoldenGamma);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// FNV-1a 64-bit hash of a label, used to derive independent substreams.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Self-contained xoshiro256++ stream with helpers for the distributions the
/// simulator needs. Copyable; copies replay identically from the copy point.
class RngStream {
 public:
  RngStream() : RngStream(0) {}

  explicit RngStream(std::uint64_t seed) {
    // Seed the four state words from splitmix64 as recommended by the
    // xoshiro authors; guards against the all-zero state.
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGoldenGamma;
  }

  /// Next raw 64-bit output (xoshiro256++).
  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Unbiased via rejection; requires n > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= reject_below) return x % n;
    }
  }

  /// Standard normal deviate via Box–Muller (second value cached).
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 must be > 0 for the log; the 53-bit uniform can return exactly 0.
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    cached_ = r * std::sin(two_pi * u2);
    have_cached_ = true;
    return r * std::cos(two_pi * u2);
  }

  /// Exponential deviate with the given scale (mean), via inverse CDF.
  double next_exponential(double scale) {
    double u;
    do {
      u = next_double();
    } while (u >= 1.0 - 1e-17);  // keep log1p argument away from -1
    return -scale * std::log1p(-u);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Derives an independent stream from a master seed, a role label, and an
/// index (e.g. agent id or run number). The derivation is pure arithmetic on
/// the inputs, so any stream can be reconstructed in isolation — this is what
/// keeps parallel runs byte-identical to sequential ones.
inline RngStream derive_stream(std::uint64_t master_seed, std::string_view label,
                               std::uint64_t index = 0) {
  std::uint64_t st = master_seed ^ fnv1a64(label);
  std::uint64_t mixed = splitmix64_next(st);
  st = mixed + index * kGoldenGamma;
  return RngStream(splitmix64_next(st));
}

}  // namespace drfed
