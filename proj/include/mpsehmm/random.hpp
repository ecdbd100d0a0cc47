#pragma once

// Portable seeded generator for reproducible fixtures.
//
// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9e3779b97f4a7c15, then
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   z =  z ^ (z >> 31)
// Uniform doubles take the top 53 bits; normals use the Box-Muller cosine
// branch only (one normal per two uniforms), so the stream is fixed by the seed
// alone. The standard library engines are avoided on purpose: <random>
// distributions are not specified bit-for-bit across implementations.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mpsehmm {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open_zero()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  std::uint64_t state_;
};

}  // namespace mpsehmm
