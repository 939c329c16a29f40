#include "tonebias/metrics.hpp"

#include "tonebias/error.hpp"

namespace tonebias {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassScores class_scores(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassScores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  // 2PR / (P + R) reduced to counts: one correctly rounded division.
  s.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  return s;
}

}  // namespace

Metrics compute_metrics(std::span<const Polarity> y_true, std::span<const Polarity> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(ErrorCode::LengthMismatch, "y_true has " + std::to_string(y_true.size()) +
                                               " labels, y_pred has " + std::to_string(y_pred.size()));
  }
  Metrics m;
  m.n = y_true.size();
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i] == Polarity::positive ? 1 : 0;
    const int p = y_pred[i] == Polarity::positive ? 1 : 0;
    ++m.confusion[t][p];
  }
  const auto& c = m.confusion;
  m.accuracy = ratio(c[0][0] + c[1][1], m.n);
  m.positive = class_scores(c[1][1], c[0][1], c[1][0]);
  m.negative = class_scores(c[0][0], c[1][0], c[0][1]);
  m.macro_f1 = 0.5 * (m.positive.f1 + m.negative.f1);
  return m;
}

}  // namespace tonebias
