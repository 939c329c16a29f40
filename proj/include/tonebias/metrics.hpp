#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "tonebias/dataset.hpp"

namespace tonebias {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  double accuracy = 0.0;
  ClassScores positive;
  ClassScores negative;
  double macro_f1 = 0.0;
  // confusion[t][p], index 0 = negative, 1 = positive; t = truth, p = prediction.
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  std::size_t n = 0;
};

// 0/0 precision or recall counts as 0. Macro-F1 is the mean of the two
// per-class F1 values. Throws LengthMismatch (also for empty input).
Metrics compute_metrics(std::span<const Polarity> y_true, std::span<const Polarity> y_pred);

}  // namespace tonebias
