#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace snowtrend {

// Deterministic draws on top of mt19937_64. The standard distribution objects
// are implementation-defined, so uniforms and normals are derived here
// explicitly and reproduce bit-for-bit everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {  // Box-Muller, cosine branch
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

}  // namespace snowtrend
