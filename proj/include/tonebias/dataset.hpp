#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tonebias/features.hpp"

namespace tonebias {

enum class Polarity : int { negative = -1, positive = 1 };

constexpr double sign(Polarity y) { return y == Polarity::positive ? 1.0 : -1.0; }
constexpr Polarity flip(Polarity y) {
  return y == Polarity::positive ? Polarity::negative : Polarity::positive;
}

// Feature rows with binary targets. Every row has dimension `dim`.
struct Dataset {
  std::vector<SparseVector> rows;
  std::vector<Polarity> y;
  std::size_t dim = 0;

  std::size_t size() const { return rows.size(); }
  std::size_t count(Polarity c) const;

  Dataset subset(std::span<const std::size_t> index) const;
};

// Throws DimensionMismatch on ragged rows, LengthMismatch when rows and y
// differ in length.
void validate(const Dataset& data);

}  // namespace tonebias
