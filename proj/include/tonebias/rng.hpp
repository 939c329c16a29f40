#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace tonebias {

// mt19937_64 is fully specified by the standard, but the std distributions
// and std::shuffle are not. Everything that feeds an output file draws
// through these helpers so results match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). Modulo bias is below 2^-40 for the sizes used here.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Standard normal from two 64-bit words (Box-Muller).
inline double normal_from_bits(std::uint64_t a, std::uint64_t b) {
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double Rng::normal() {
  const std::uint64_t a = next();
  return normal_from_bits(a, next());
}

}  // namespace tonebias
