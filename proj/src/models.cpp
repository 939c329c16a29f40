#include "tonebias/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/kernels.hpp"
#include "tonebias/mathutil.hpp"
#include "tonebias/metrics.hpp"
#include "tonebias/rng.hpp"
#include "tonebias/split.hpp"

namespace tonebias {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::mnb: return "mnb";
    case ModelKind::logreg: return "logreg";
    case ModelKind::svm: return "svm";
  }
  return "mnb";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "mnb") return ModelKind::mnb;
  if (s == "logreg") return ModelKind::logreg;
  if (s == "svm") return ModelKind::svm;
  return std::nullopt;
}

namespace {

void require_both_classes(const Dataset& data) {
  validate(data);
  if (data.count(Polarity::positive) == 0 || data.count(Polarity::negative) == 0) {
    throw Error(ErrorCode::SingleClass, "training data must contain both polarities");
  }
}

void require_c(double C) {
  if (!(C >= kMinC && C <= kMaxC)) {
    throw Error(ErrorCode::InvalidConfig, "C must lie in [0.1, 3] (got " + std::to_string(C) + ")");
  }
}

void require_dim(std::size_t expected, const SparseVector& x) {
  if (x.dim != expected) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimension " + std::to_string(x.dim) +
                                                  ", model expects " + std::to_string(expected));
  }
}

double inf_norm(const std::vector<double>& g, double gb) {
  double m = std::abs(gb);
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

MnbModel train_mnb(const Dataset& data, double alpha) {
  if (!(alpha >= kMinAlpha && alpha <= kMaxAlpha)) {
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in [0.1, 1] (got " + std::to_string(alpha) + ")");
  }
  require_both_classes(data);
  MnbModel m;
  m.alpha = alpha;
  m.dim = data.dim;
  std::array<std::vector<double>, 2> counts{std::vector<double>(data.dim, 0.0),
                                           std::vector<double>(data.dim, 0.0)};
  std::array<double, 2> n_class{0.0, 0.0};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.y[i] == Polarity::positive ? 1 : 0;
    n_class[c] += 1.0;
    const SparseVector& x = data.rows[i];
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (x.values[k] < 0.0) throw Error(ErrorCode::NegativeFeature, "row " + std::to_string(i));
      counts[c][x.indices[k]] += x.values[k];
    }
  }
  const double n = n_class[0] + n_class[1];
  for (int c = 0; c < 2; ++c) {
    m.log_prior[c] = std::log(n_class[c] / n);
    const double total = std::accumulate(counts[c].begin(), counts[c].end(), 0.0) +
                         alpha * static_cast<double>(data.dim);
    m.log_likelihood[c].resize(data.dim);
    for (std::size_t t = 0; t < data.dim; ++t) {
      m.log_likelihood[c][t] = std::log((counts[c][t] + alpha) / total);
    }
  }
  return m;
}

double predict_mnb(const MnbModel& model, const SparseVector& x) {
  require_dim(model.dim, x);
  std::array<double, 2> score = model.log_prior;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < x.nnz(); ++k) score[c] += x.values[k] * model.log_likelihood[c][x.indices[k]];
  }
  // exp(s1) / (exp(s0) + exp(s1))
  return sigmoid(score[1] - score[0]);
}

double decision_value(const LinearModel& model, const SparseVector& x) {
  require_dim(model.w.size(), x);
  return x.dot(model.w) + model.b;
}

LinearModel train_logreg(const Dataset& data, const LogregOptions& opts) {
  require_both_classes(data);
  const double l2 = opts.regularize ? 1.0 : 0.0;
  const double C = opts.regularize ? opts.C : 1.0;
  if (opts.regularize) require_c(opts.C);
  const std::size_t dim = data.dim;

  std::vector<double> x_w(dim, 0.0), y_w(dim, 0.0), trial_w(dim, 0.0);
  double x_b = 0.0, y_b = 0.0;
  double f_x = kernels::logistic_objective(data, x_w, x_b, C, l2);
  double momentum = 1.0;
  double step = 1.0;
  std::size_t it = 0;

  for (; it < opts.max_iters; ++it) {
    const auto terms = kernels::logistic_objective_grad(data, y_w, y_b, C, l2);
    if (!std::isfinite(terms.objective)) throw Error(ErrorCode::NonFinite, "objective diverged");
    const double gnorm = inf_norm(terms.grad_w, terms.grad_b);
    if (!std::isfinite(gnorm)) throw Error(ErrorCode::NonFinite, "gradient diverged");
    if (gnorm < opts.tol) {
      if (terms.objective <= f_x) {
        x_w = y_w;
        x_b = y_b;
        f_x = terms.objective;
      }
      break;
    }
    double gsq = terms.grad_b * terms.grad_b;
    for (double g : terms.grad_w) gsq += g * g;

    // Backtracking (Armijo) from the momentum point.
    step *= 2.0;
    double f_trial = 0.0;
    double trial_b = 0.0;
    for (;;) {
      for (std::size_t j = 0; j < dim; ++j) trial_w[j] = y_w[j] - step * terms.grad_w[j];
      trial_b = y_b - step * terms.grad_b;
      f_trial = kernels::logistic_objective(data, trial_w, trial_b, C, l2);
      if (f_trial <= terms.objective - 0.5 * step * gsq) break;
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (!std::isfinite(f_trial)) throw Error(ErrorCode::NonFinite, "line search diverged");

    if (f_trial > f_x) {
      // Momentum overshot: restart from the last accepted point.
      if (momentum == 1.0) break;
      y_w = x_w;
      y_b = x_b;
      momentum = 1.0;
      continue;
    }
    const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = (momentum - 1.0) / next;
    for (std::size_t j = 0; j < dim; ++j) {
      y_w[j] = trial_w[j] + beta * (trial_w[j] - x_w[j]);
    }
    y_b = trial_b + beta * (trial_b - x_b);
    x_w.swap(trial_w);
    x_b = trial_b;
    f_x = f_trial;
    momentum = next;
  }

  LinearModel model;
  model.w = std::move(x_w);
  model.b = x_b;
  model.kind = ModelKind::logreg;
  model.C = opts.C;
  model.objective = f_x;
  model.iterations = it;
  return model;
}

double predict_logreg(const LinearModel& model, const SparseVector& x) {
  return sigmoid(decision_value(model, x));
}

LinearModel train_svm(const Dataset& data, const SvmOptions& opts) {
  require_both_classes(data);
  require_c(opts.C);
  if (opts.epochs == 0) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  const std::size_t n = data.size();
  const double lambda = 1.0 / (opts.C * static_cast<double>(n));

  // w = scale * v keeps the per-step shrink O(1).
  std::vector<double> v(data.dim, 0.0);
  double vb = 0.0;
  double scale = 1.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(opts.seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const SparseVector& x = data.rows[i];
      const double y = sign(data.y[i]);
      const double margin = scale * (x.dot(v) + vb);
      const double shrink = 1.0 - 1.0 / static_cast<double>(t);
      if (shrink == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        vb = 0.0;
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (y * margin < 1.0) {
        const double step = eta * y / scale;
        for (std::size_t k = 0; k < x.nnz(); ++k) v[x.indices[k]] += step * x.values[k];
        vb += step;
      }
      if (scale < 1e-9) {
        for (double& e : v) e *= scale;
        vb *= scale;
        scale = 1.0;
      }
    }
  }
  LinearModel model;
  model.kind = ModelKind::svm;
  model.C = opts.C;
  model.w.resize(data.dim);
  for (std::size_t j = 0; j < data.dim; ++j) model.w[j] = scale * v[j];
  model.b = scale * vb;
  model.iterations = t;
  model.objective = svm_objective(model, data);
  return model;
}

double svm_objective(const LinearModel& model, const Dataset& data) {
  double reg = 0.0;
  for (double w : model.w) reg += w * w;
  const auto m = kernels::margins(data.rows, model.w, model.b);
  double hinge = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) hinge += std::max(0.0, 1.0 - sign(data.y[i]) * m[i]);
  return 0.5 * reg + model.C * hinge;
}

double CalibrationParams::probability(double margin) const { return sigmoid(-(A * margin + B)); }

CalibrationParams platt_calibrate(std::span<const double> margins, std::span<const Polarity> y) {
  if (margins.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "margins and labels differ in length");
  const auto n_pos = static_cast<double>(std::count(y.begin(), y.end(), Polarity::positive));
  const auto n_neg = static_cast<double>(y.size()) - n_pos;
  if (n_pos < 2 || n_neg < 2) {
    throw Error(ErrorCode::SingleClass, "calibration needs at least two samples per class");
  }
  const auto [lo, hi] = std::minmax_element(margins.begin(), margins.end());
  if (*lo == *hi) {
    return {0.0, -logit(n_pos / (n_pos + n_neg))};
  }

  const double hi_target = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo_target = 1.0 / (n_neg + 2.0);
  std::vector<double> t(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] == Polarity::positive ? hi_target : lo_target;

  // Negative log-likelihood of targets under p = 1 / (1 + exp(A m + B)).
  auto nll = [&](double A, double B) {
    double f = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double z = margins[i] * A + B;
      f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double A = 0.0;
  double B = std::log((n_neg + 1.0) / (n_pos + 1.0));
  double fval = nll(A, B);
  constexpr double kRidge = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kRidge, h22 = kRidge, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double z = margins[i] * A + B;
      double p, q;
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += margins[i] * margins[i] * d2;
      h22 += d2;
      h21 += margins[i] * d2;
      const double d1 = t[i] - p;
      g1 += margins[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-10 && std::abs(g2) < 1e-10) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double stepsize = 1.0;
    bool moved = false;
    while (stepsize >= 1e-10) {
      const double nA = A + stepsize * dA;
      const double nB = B + stepsize * dB;
      const double nf = nll(nA, nB);
      if (nf < fval + 1e-4 * stepsize * gd) {
        A = nA;
        B = nB;
        fval = nf;
        moved = true;
        break;
      }
      stepsize /= 2.0;
    }
    if (!moved) break;
  }
  return {A, B};
}

double log_loss(std::span<const double> p, std::span<const Polarity> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = y[i] == Polarity::positive ? p[i] : 1.0 - p[i];
    loss -= std::log(q);
  }
  return loss / static_cast<double>(p.size());
}

ModelKind Classifier::kind() const {
  if (std::holds_alternative<MnbModel>(model_)) return ModelKind::mnb;
  return std::get<LinearModel>(model_).kind;
}

std::size_t Classifier::dim() const {
  if (const auto* m = std::get_if<MnbModel>(&model_)) return m->dim;
  return std::get<LinearModel>(model_).w.size();
}

double Classifier::predict_proba(const SparseVector& x) const {
  if (const auto* m = std::get_if<MnbModel>(&model_)) return predict_mnb(*m, x);
  const auto& lin = std::get<LinearModel>(model_);
  if (lin.kind == ModelKind::logreg) return predict_logreg(lin, x);
  if (!calib_) throw Error(ErrorCode::MissingCalibration, "SVM posterior needs calibration parameters");
  return calib_->probability(decision_value(lin, x));
}

std::vector<double> Classifier::predict_proba(std::span<const SparseVector> rows) const {
  if (const auto* lin = std::get_if<LinearModel>(&model_)) {
    if (lin->kind == ModelKind::svm && !calib_) {
      throw Error(ErrorCode::MissingCalibration, "SVM posterior needs calibration parameters");
    }
    for (const auto& r : rows) require_dim(lin->w.size(), r);
    auto out = kernels::margins(rows, lin->w, lin->b);
    for (double& m : out) m = lin->kind == ModelKind::logreg ? sigmoid(m) : calib_->probability(m);
    return out;
  }
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict_proba(r));
  return out;
}

std::string describe(const ModelSpec& spec) {
  char buf[64];
  if (spec.kind == ModelKind::mnb) {
    std::snprintf(buf, sizeof(buf), "alpha=%.2f", spec.alpha);
  } else {
    std::snprintf(buf, sizeof(buf), "C=%.2f", spec.C);
  }
  return buf;
}

Classifier fit_classifier(const ModelSpec& spec, const Dataset& data) {
  switch (spec.kind) {
    case ModelKind::mnb:
      return Classifier(train_mnb(data, spec.alpha));
    case ModelKind::logreg:
      return Classifier(train_logreg(data, {spec.C, spec.max_iters, spec.tol, true}));
    case ModelKind::svm: {
      require_both_classes(data);
      const auto split = stratified_split(data.y, {spec.calib_fraction, mix64(spec.seed)});
      const Dataset fit_part = data.subset(split.train);
      const Dataset calib_part = data.subset(split.test);
      LinearModel svm = train_svm(fit_part, {spec.C, spec.epochs, spec.seed});
      const Dataset* held = &calib_part;
      // Tiny inputs: fall back to the training margins.
      if (calib_part.count(Polarity::positive) < 2 || calib_part.count(Polarity::negative) < 2) held = &fit_part;
      const auto m = kernels::margins(held->rows, svm.w, svm.b);
      const auto calib = platt_calibrate(m, held->y);
      return Classifier(std::move(svm), calib);
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model kind");
}

Selection select_model(const ModelSpec& base, const Dataset& data, const GridOptions& grid) {
  require_both_classes(data);
  const auto split = stratified_split(data.y, {grid.validation_fraction, grid.seed});
  const Dataset train = data.subset(split.train);
  const Dataset val = data.subset(split.test);
  const auto& values = base.kind == ModelKind::mnb ? grid.alpha_grid : grid.c_grid;
  if (values.empty()) throw Error(ErrorCode::InvalidConfig, "empty hyperparameter grid");

  Selection best{base, -1.0};
  for (double v : values) {
    ModelSpec spec = base;
    (spec.kind == ModelKind::mnb ? spec.alpha : spec.C) = v;
    const Classifier model = fit_classifier(spec, train);
    const auto p = model.predict_proba(val.rows);
    std::vector<Polarity> pred(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pred[i] = p[i] > 0.5 ? Polarity::positive : Polarity::negative;
    const double f1 = compute_metrics(val.y, pred).macro_f1;
    if (f1 > best.validation_macro_f1) best = {spec, f1};
  }
  return best;
}

nlohmann::ordered_json to_json(const Classifier& model, const std::string& feature_hash) {
  nlohmann::ordered_json j;
  j["format"] = "tonebias-model";
  j["version"] = 1;
  j["kind"] = std::string(to_string(model.kind()));
  j["feature_dim"] = model.dim();
  j["feature_hash"] = feature_hash;
  if (const auto* m = std::get_if<MnbModel>(&model.model())) {
    j["hyperparameters"] = {{"alpha", m->alpha}};
    j["log_prior"] = {{"negative", m->log_prior[0]}, {"positive", m->log_prior[1]}};
    j["log_likelihood"] = {{"negative", m->log_likelihood[0]}, {"positive", m->log_likelihood[1]}};
  } else {
    const auto& lin = std::get<LinearModel>(model.model());
    j["hyperparameters"] = {{"C", lin.C}};
    j["b"] = lin.b;
    j["w"] = lin.w;
    if (model.calibration()) j["calibration"] = {{"A", model.calibration()->A}, {"B", model.calibration()->B}};
  }
  return j;
}

Classifier classifier_from_json(const nlohmann::json& j, const std::string& expected_feature_hash) {
  try {
    if (j.at("format") != "tonebias-model" || j.at("version") != 1) {
      throw Error(ErrorCode::MalformedRecord, "not a version 1 tonebias model");
    }
    if (j.at("feature_hash").get<std::string>() != expected_feature_hash) {
      throw Error(ErrorCode::HashMismatch, "model was fitted on features " +
                                               j.at("feature_hash").get<std::string>() + ", got " +
                                               expected_feature_hash);
    }
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::MalformedRecord, "unknown model kind");
    const auto dim = j.at("feature_dim").get<std::size_t>();
    if (*kind == ModelKind::mnb) {
      MnbModel m;
      m.dim = dim;
      m.alpha = j.at("hyperparameters").at("alpha").get<double>();
      m.log_prior = {j.at("log_prior").at("negative").get<double>(), j.at("log_prior").at("positive").get<double>()};
      m.log_likelihood[0] = j.at("log_likelihood").at("negative").get<std::vector<double>>();
      m.log_likelihood[1] = j.at("log_likelihood").at("positive").get<std::vector<double>>();
      if (m.log_likelihood[0].size() != dim || m.log_likelihood[1].size() != dim) {
        throw Error(ErrorCode::DimensionMismatch, "likelihood table size differs from feature_dim");
      }
      return Classifier(std::move(m));
    }
    LinearModel lin;
    lin.kind = *kind;
    lin.C = j.at("hyperparameters").at("C").get<double>();
    lin.b = j.at("b").get<double>();
    lin.w = j.at("w").get<std::vector<double>>();
    if (lin.w.size() != dim) throw Error(ErrorCode::DimensionMismatch, "weight vector size differs from feature_dim");
    std::optional<CalibrationParams> calib;
    if (j.contains("calibration")) {
      calib = CalibrationParams{j["calibration"].at("A").get<double>(), j["calibration"].at("B").get<double>()};
    }
    return Classifier(std::move(lin), calib);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("model JSON: ") + e.what());
  }
}

std::string model_hash(const Classifier& model) {
  return hex64(fnv1a64(to_json(model, "").dump()));
}

}  // namespace tonebias
