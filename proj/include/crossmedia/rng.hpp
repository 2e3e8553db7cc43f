#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace crossmedia {

/// splitmix64 finalizer; spreads low-entropy inputs over the full 64-bit range.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and up to three
/// indices (axis point, trial, purpose). Same inputs always give the same
/// seed, so parallel workers can own disjoint reproducible streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0xbf58476d1ce4e5b9ULL));
  h = mix64(h ^ (c + 0x94d049bb133111ebULL));
  return h;
}

/// Random source with explicitly coded samplers. The std:: distributions are
/// implementation-defined, so all draws go through our own transforms to keep
/// streams bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one spare cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Exponential with mean 1.
  double exponential() { return -std::log(1.0 - uniform()); }

  /// Uniform phase point on the unit circle.
  std::complex<double> unit_phase() {
    const double a = 2.0 * std::numbers::pi * uniform();
    return {std::cos(a), std::sin(a)};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace crossmedia
