#include "tonebias/dataset.hpp"

#include <algorithm>

#include "tonebias/error.hpp"

namespace tonebias {

std::size_t Dataset::count(Polarity c) const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), c));
}

Dataset Dataset::subset(std::span<const std::size_t> index) const {
  Dataset out;
  out.dim = dim;
  out.rows.reserve(index.size());
  out.y.reserve(index.size());
  for (auto i : index) {
    out.rows.push_back(rows[i]);
    out.y.push_back(y[i]);
  }
  return out;
}

void validate(const Dataset& data) {
  if (data.rows.size() != data.y.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature rows and labels differ in length");
  }
  for (const auto& r : data.rows) {
    if (r.dim != data.dim) {
      throw Error(ErrorCode::DimensionMismatch, "row of dimension " + std::to_string(r.dim) +
                                                    " in a dataset of dimension " + std::to_string(data.dim));
    }
  }
}

}  // namespace tonebias
