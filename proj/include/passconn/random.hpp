#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace passconn {

// splitmix64 finalizer; used to derive independent per-streamline streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// mt19937_64 with variate conversions written out explicitly so that a given
// seed produces the same doubles with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Stream for the `ordinal`-th seed attempt of a run seeded with `master`.
  static Rng for_ordinal(std::uint64_t master, std::uint64_t ordinal) {
    return Rng(mix64(mix64(master) ^ mix64(ordinal + 0x632BE59BD9B4E019ull)));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  // Standard normal (Box-Muller, one variate per pair of uniforms).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace passconn
