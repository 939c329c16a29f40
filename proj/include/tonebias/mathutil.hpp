#pragma once

#include <cmath>

namespace tonebias {

// Logistic function. sigmoid(-x) == 1 - sigmoid(x) holds bit-for-bit: the
// value for |x| lies in [0.5, 1], where 1 - a is exact.
inline double sigmoid(double x) {
  const double a = 1.0 / (1.0 + std::exp(-std::abs(x)));
  return x >= 0.0 ? a : 1.0 - a;
}

// ln(1 + e^x) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

}  // namespace tonebias
