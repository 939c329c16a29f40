#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tonebias/dataset.hpp"
#include "tonebias/models.hpp"

namespace tonebias {

struct SoftVoteConfig {
  std::vector<double> weights;

  static SoftVoteConfig uniform(std::size_t k);
};

// Throws WeightSimplexViolation unless w_k >= 0 and sum w_k = 1 +- 1e-9.
void validate(const SoftVoteConfig& cfg);

// p_ens(+1 | x) = sum_k w_k p_k(+1 | x). Throws ArityMismatch,
// WeightSimplexViolation, OutOfRange (a posterior outside [0, 1]).
double soft_vote(std::span<const double> posteriors, const SoftVoteConfig& cfg);

// argmax over {-1, +1}; an exact 0.5 goes to -1.
Polarity ensemble_label(double p_ens);

struct StackModel {
  double beta0 = 0.0;
  std::vector<double> beta;
  std::size_t folds = 5;
  double decision_tau = 0.5;

  std::size_t arity() const { return beta.size(); }
};

struct StackPrediction {
  double p_ens = 0.5;
  Polarity label = Polarity::negative;
};

// p_ens = sigmoid(beta0 + beta.z); label +1 iff p_ens >= decision_tau.
// Throws ArityMismatch.
StackPrediction predict_stacking(const StackModel& stack, std::span<const double> z);

struct StackingFit {
  StackModel model;
  std::vector<Classifier> bases;            // refit on the full training data
  std::vector<std::vector<double>> oof;     // out-of-fold z rows, one per sample
  std::vector<std::size_t> fold_of;         // fold that held each sample out
};

// For each stratified fold, trains every base model on the other folds and
// records its posteriors on the held-out fold; fits an unregularized logistic
// meta-model on those rows, then refits the bases on all of `data`.
// Throws TooFewSamples (a class smaller than `folds`), SingleClass.
StackingFit fit_stacking(std::span<const ModelSpec> base_specs, const Dataset& data,
                         std::size_t folds, std::uint64_t seed, double decision_tau = 0.5);

// Posteriors of every base model for one row, in base order.
std::vector<double> base_posteriors(std::span<const Classifier> bases, const SparseVector& x);

// Ensembles reference their base models by hash; loading refuses a base set
// whose hashes differ (HashMismatch).
nlohmann::ordered_json vote_to_json(const SoftVoteConfig& cfg, std::span<const Classifier> bases);
nlohmann::ordered_json stack_to_json(const StackModel& stack, std::span<const Classifier> bases);
SoftVoteConfig vote_from_json(const nlohmann::json& j, std::span<const Classifier> bases);
StackModel stack_from_json(const nlohmann::json& j, std::span<const Classifier> bases);

}  // namespace tonebias
