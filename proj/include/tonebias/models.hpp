#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tonebias/dataset.hpp"

namespace tonebias {

enum class ModelKind { mnb, logreg, svm };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view s);

// Multinomial naive Bayes. Index 0 holds the negative class, 1 the positive.
struct MnbModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_likelihood;
  double alpha = 1.0;
  std::size_t dim = 0;
};

inline constexpr double kMinAlpha = 0.1;
inline constexpr double kMaxAlpha = 1.0;
inline constexpr double kMinC = 0.1;
inline constexpr double kMaxC = 3.0;

// log_likelihood(c, t) = ln((count(c, t) + alpha) / (sum_t' count(c, t') + alpha |V|)),
// log_prior(c) = ln(n_c / n). Fractional feature values count as fractional
// occurrences. Throws NegativeFeature, SingleClass, InvalidConfig (alpha
// outside [0.1, 1]).
MnbModel train_mnb(const Dataset& data, double alpha);

// Posterior of the positive class, normalized in log space.
// Throws DimensionMismatch.
double predict_mnb(const MnbModel& model, const SparseVector& x);

struct LinearModel {
  std::vector<double> w;
  double b = 0.0;
  ModelKind kind = ModelKind::logreg;
  double C = 1.0;
  double objective = 0.0;  // final training objective
  std::size_t iterations = 0;
};

double decision_value(const LinearModel& model, const SparseVector& x);

struct LogregOptions {
  double C = 1.0;
  std::size_t max_iters = 2000;
  double tol = 1e-6;
  // false drops the penalty term: J = sum_i ln(1 + exp(-y_i m_i)).
  bool regularize = true;
};

// Minimizes 1/2 |w|^2 + C sum_i ln(1 + exp(-y_i (w.x_i + b))) by gradient
// descent with backtracking line search and Nesterov momentum (restarted
// whenever the objective would rise). Stops once |grad|_inf < tol or after
// max_iters. Never returns a point worse than (0, 0).
// Throws SingleClass, NonFinite, InvalidConfig (C outside [0.1, 3]).
LinearModel train_logreg(const Dataset& data, const LogregOptions& opts);

double predict_logreg(const LinearModel& model, const SparseVector& x);

struct SvmOptions {
  double C = 1.0;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
};

// Pegasos stochastic subgradient descent on
// 1/2 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b)) with lambda = 1 / (C n)
// and step 1 / (lambda t). The bias is carried as a constant feature.
// Throws SingleClass, InvalidConfig.
LinearModel train_svm(const Dataset& data, const SvmOptions& opts);

double svm_objective(const LinearModel& model, const Dataset& data);

// p(m) = 1 / (1 + exp(A m + B)).
struct CalibrationParams {
  double A = 0.0;
  double B = 0.0;

  double probability(double margin) const;
};

// Platt scaling fitted by Newton's method with backtracking on smoothed
// targets. Constant margins yield A = 0 and p = the positive-class prior.
// Throws SingleClass when either class has fewer than two samples,
// LengthMismatch.
CalibrationParams platt_calibrate(std::span<const double> margins, std::span<const Polarity> y);

double log_loss(std::span<const double> p, std::span<const Polarity> y);

// A trained base model with a uniform posterior interface.
class Classifier {
 public:
  Classifier() = default;
  explicit Classifier(MnbModel m) : model_(std::move(m)) {}
  explicit Classifier(LinearModel m, std::optional<CalibrationParams> calib = std::nullopt)
      : model_(std::move(m)), calib_(calib) {}

  ModelKind kind() const;
  std::size_t dim() const;
  const std::variant<MnbModel, LinearModel>& model() const { return model_; }
  const std::optional<CalibrationParams>& calibration() const { return calib_; }

  // MNB and LR are native; SVM goes through its calibration.
  // Throws MissingCalibration, DimensionMismatch.
  double predict_proba(const SparseVector& x) const;
  std::vector<double> predict_proba(std::span<const SparseVector> rows) const;

 private:
  std::variant<MnbModel, LinearModel> model_;
  std::optional<CalibrationParams> calib_;
};

struct ModelSpec {
  ModelKind kind = ModelKind::logreg;
  double alpha = 1.0;
  double C = 1.0;
  std::size_t max_iters = 2000;
  double tol = 1e-6;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  double calib_fraction = 0.2;  // SVM only
};

std::string describe(const ModelSpec& spec);

// SVM: trains on a stratified (1 - calib_fraction) part and fits Platt
// parameters on the held-out margins.
Classifier fit_classifier(const ModelSpec& spec, const Dataset& data);

struct GridOptions {
  std::vector<double> alpha_grid{0.1, 0.5, 1.0};
  std::vector<double> c_grid{0.1, 0.5, 1.0, 2.0, 3.0};
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct Selection {
  ModelSpec spec;
  double validation_macro_f1 = 0.0;
};

// Picks alpha (MNB) or C (LR, SVM) by macro-F1 on a stratified inner
// validation fold. Ties keep the earlier grid value.
Selection select_model(const ModelSpec& base, const Dataset& data, const GridOptions& grid);

// Versioned JSON; `feature_hash` identifies the vocabulary or vector table
// the model was fitted against.
nlohmann::ordered_json to_json(const Classifier& model, const std::string& feature_hash);
// Throws HashMismatch when the stored feature hash differs from `expected`,
// MalformedRecord on schema errors.
Classifier classifier_from_json(const nlohmann::json& j, const std::string& expected_feature_hash);
std::string model_hash(const Classifier& model);

}  // namespace tonebias
