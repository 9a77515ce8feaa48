#pragma once

// Seeded random stream with distribution code of our own, so draws are
// identical across standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>

#include "orbit.hpp"

namespace multitrack {

class Rng {

  public:

    explicit Rng(std::uint64_t seed) : _engine(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
      return static_cast<double>(_engine() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
      return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n). Modulo bias is below 2^-40 for the sizes used here.
    std::size_t index(std::size_t n) {
      return static_cast<std::size_t>(_engine() % n);
    }

    // Standard normal via Box-Muller; one draw per call.
    double normal() {
      const double u1 = 1.0 - uniform();   // (0, 1]
      const double u2 = uniform();
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    std::uint64_t next() { return _engine(); }

  private:

    std::mt19937_64 _engine;
};

}  // end of namespace multitrack -------------------------------------------
