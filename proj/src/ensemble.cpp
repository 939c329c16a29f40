#include "tonebias/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "tonebias/error.hpp"
#include "tonebias/mathutil.hpp"
#include "tonebias/split.hpp"

namespace tonebias {

SoftVoteConfig SoftVoteConfig::uniform(std::size_t k) {
  return {std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

void validate(const SoftVoteConfig& cfg) {
  if (cfg.weights.empty()) throw Error(ErrorCode::WeightSimplexViolation, "no weights");
  double sum = 0.0;
  for (double w : cfg.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::WeightSimplexViolation, "weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::WeightSimplexViolation, "weights sum to " + std::to_string(sum));
  }
}

double soft_vote(std::span<const double> posteriors, const SoftVoteConfig& cfg) {
  validate(cfg);
  if (posteriors.size() != cfg.weights.size()) {
    throw Error(ErrorCode::ArityMismatch, std::to_string(posteriors.size()) + " posteriors for " +
                                              std::to_string(cfg.weights.size()) + " weights");
  }
  for (double p : posteriors) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfRange, "posterior outside [0, 1]");
  }
  // Accumulating offsets from the minimum returns a common value unchanged
  // and keeps the result inside [min p_k, max p_k] under rounding. Summing
  // the (p, w) pairs in sorted order makes the result independent of model order.
  std::vector<std::pair<double, double>> terms;
  terms.reserve(posteriors.size());
  for (std::size_t k = 0; k < posteriors.size(); ++k) terms.emplace_back(posteriors[k], cfg.weights[k]);
  std::sort(terms.begin(), terms.end());
  const double lo = terms.front().first;
  const double hi = terms.back().first;
  double offset = 0.0;
  for (const auto& [p, w] : terms) offset += w * (p - lo);
  return std::clamp(lo + offset, lo, hi);
}

Polarity ensemble_label(double p_ens) {
  return p_ens > 0.5 ? Polarity::positive : Polarity::negative;
}

StackPrediction predict_stacking(const StackModel& stack, std::span<const double> z) {
  if (z.size() != stack.beta.size()) {
    throw Error(ErrorCode::ArityMismatch, "stack expects " + std::to_string(stack.beta.size()) +
                                              " posteriors, got " + std::to_string(z.size()));
  }
  double s = stack.beta0;
  for (std::size_t k = 0; k < z.size(); ++k) s += stack.beta[k] * z[k];
  const double p = sigmoid(s);
  return {p, p >= stack.decision_tau ? Polarity::positive : Polarity::negative};
}

std::vector<double> base_posteriors(std::span<const Classifier> bases, const SparseVector& x) {
  std::vector<double> z;
  z.reserve(bases.size());
  for (const auto& b : bases) z.push_back(b.predict_proba(x));
  return z;
}

StackingFit fit_stacking(std::span<const ModelSpec> base_specs, const Dataset& data,
                         std::size_t folds, std::uint64_t seed, double decision_tau) {
  validate(data);
  if (base_specs.empty()) throw Error(ErrorCode::InvalidConfig, "stacking needs at least one base model");
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "stacking needs at least two folds");
  if (!(decision_tau > 0.0 && decision_tau < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "stacking decision threshold must lie in (0, 1)");
  }
  const std::size_t n_pos = data.count(Polarity::positive);
  const std::size_t n_neg = data.count(Polarity::negative);
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::SingleClass, "stacking data must contain both polarities");
  if (n_pos < folds || n_neg < folds) {
    throw Error(ErrorCode::TooFewSamples, "each class needs at least " + std::to_string(folds) + " samples");
  }

  StackingFit fit;
  fit.fold_of = stratified_folds(data.y, folds, seed);
  const std::size_t k_models = base_specs.size();
  fit.oof.assign(data.size(), std::vector<double>(k_models, 0.0));

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_idx, held_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (fit.fold_of[i] == f ? held_idx : train_idx).push_back(i);
    }
    const Dataset train = data.subset(train_idx);
    const Dataset held = data.subset(held_idx);
    for (std::size_t k = 0; k < k_models; ++k) {
      const Classifier model = fit_classifier(base_specs[k], train);
      const auto p = model.predict_proba(held.rows);
      for (std::size_t r = 0; r < held_idx.size(); ++r) fit.oof[held_idx[r]][k] = p[r];
    }
  }

  Dataset meta;
  meta.dim = k_models;
  meta.y = data.y;
  meta.rows.reserve(data.size());
  for (const auto& z : fit.oof) {
    SparseVector row;
    row.dim = k_models;
    for (std::size_t k = 0; k < k_models; ++k) {
      row.indices.push_back(static_cast<std::uint32_t>(k));
      row.values.push_back(z[k]);
    }
    meta.rows.push_back(std::move(row));
  }
  LogregOptions opts;
  opts.regularize = false;
  opts.max_iters = 500;
  opts.tol = 1e-8;
  const LinearModel lr = train_logreg(meta, opts);

  fit.model.beta0 = lr.b;
  fit.model.beta = lr.w;
  fit.model.folds = folds;
  fit.model.decision_tau = decision_tau;
  for (const auto& spec : base_specs) fit.bases.push_back(fit_classifier(spec, data));
  return fit;
}

namespace {

nlohmann::ordered_json base_hashes(std::span<const Classifier> bases) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& b : bases) {
    arr.push_back({{"kind", std::string(to_string(b.kind()))}, {"hash", model_hash(b)}});
  }
  return arr;
}

void check_bases(const nlohmann::json& j, std::span<const Classifier> bases) {
  const auto& stored = j.at("bases");
  if (stored.size() != bases.size()) {
    throw Error(ErrorCode::HashMismatch, "ensemble expects " + std::to_string(stored.size()) + " base models");
  }
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (stored[k].at("hash").get<std::string>() != model_hash(bases[k])) {
      throw Error(ErrorCode::HashMismatch, "base model " + std::to_string(k) + " differs from the one ensembled");
    }
  }
}

}  // namespace

nlohmann::ordered_json vote_to_json(const SoftVoteConfig& cfg, std::span<const Classifier> bases) {
  nlohmann::ordered_json j;
  j["format"] = "tonebias-ensemble";
  j["version"] = 1;
  j["kind"] = "vote";
  j["weights"] = cfg.weights;
  j["bases"] = base_hashes(bases);
  return j;
}

nlohmann::ordered_json stack_to_json(const StackModel& stack, std::span<const Classifier> bases) {
  nlohmann::ordered_json j;
  j["format"] = "tonebias-ensemble";
  j["version"] = 1;
  j["kind"] = "stack";
  j["beta0"] = stack.beta0;
  j["beta"] = stack.beta;
  j["folds"] = stack.folds;
  j["decision_tau"] = stack.decision_tau;
  j["bases"] = base_hashes(bases);
  return j;
}

SoftVoteConfig vote_from_json(const nlohmann::json& j, std::span<const Classifier> bases) {
  try {
    if (j.at("format") != "tonebias-ensemble" || j.at("kind") != "vote") {
      throw Error(ErrorCode::MalformedRecord, "not a soft-vote ensemble");
    }
    check_bases(j, bases);
    SoftVoteConfig cfg{j.at("weights").get<std::vector<double>>()};
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("ensemble JSON: ") + e.what());
  }
}

StackModel stack_from_json(const nlohmann::json& j, std::span<const Classifier> bases) {
  try {
    if (j.at("format") != "tonebias-ensemble" || j.at("kind") != "stack") {
      throw Error(ErrorCode::MalformedRecord, "not a stacking ensemble");
    }
    check_bases(j, bases);
    StackModel s;
    s.beta0 = j.at("beta0").get<double>();
    s.beta = j.at("beta").get<std::vector<double>>();
    s.folds = j.at("folds").get<std::size_t>();
    s.decision_tau = j.at("decision_tau").get<double>();
    if (s.beta.size() != bases.size()) throw Error(ErrorCode::ArityMismatch, "beta size differs from base count");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("ensemble JSON: ") + e.what());
  }
}

}  // namespace tonebias
