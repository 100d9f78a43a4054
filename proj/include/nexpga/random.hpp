/**
 * @file random.hpp
 * @brief Reproducible random streams for instance generation.
 *
 * Stream (seed, stream_index) is a std::mt19937_64 seeded through
 * std::seed_seq with the four 32-bit halves {seed_lo, seed_hi, idx_lo, idx_hi}.
 * Both engine and seed_seq have fully specified output, so draws are
 * identical on every conforming standard library.
 *
 *   uniform()  = (next() >> 11) * 2^-53                     in [0, 1)
 *   gaussian() = Box-Muller on u1 = 1 - uniform(), u2 = uniform():
 *                r = sqrt(-2 ln u1), returns r cos(2 pi u2) then r sin(2 pi u2)
 *   below(n)   = floor(uniform() * n)                       in [0, n)
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace nexpga {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) {
    const auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nexpga
