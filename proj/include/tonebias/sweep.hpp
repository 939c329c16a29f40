#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tonebias/corpus.hpp"
#include "tonebias/ensemble.hpp"
#include "tonebias/features.hpp"
#include "tonebias/metrics.hpp"
#include "tonebias/models.hpp"
#include "tonebias/preprocess.hpp"
#include "tonebias/weaklabel.hpp"

namespace tonebias {

enum class EvalModel { mnb, logreg, svm, vote, stack };
enum class Encoding { tfidf, dense };

std::string_view to_string(EvalModel m);
std::string_view to_string(Encoding e);
std::optional<EvalModel> parse_eval_model(std::string_view s);
std::optional<Encoding> parse_encoding(std::string_view s);

struct SweepConfig {
  std::vector<double> taus{0.60, 0.85};
  std::vector<EvalModel> models{EvalModel::mnb, EvalModel::logreg, EvalModel::svm, EvalModel::vote,
                                EvalModel::stack};
  std::vector<Encoding> encodings{Encoding::tfidf};
  const VectorTable* vectors = nullptr;  // required for Encoding::dense
  GridOptions grid;
  std::size_t min_df = 1;
  bool mnb_counts = false;  // MNB on raw counts instead of tf-idf weights
  double test_fraction = 0.2;
  std::size_t stack_folds = 5;
  double stack_tau = 0.5;
  std::vector<double> vote_weights{0.5, 0.5};  // over (logreg, svm)
  std::size_t min_class_size = 10;  // per polarity, after dropping NEUTRAL
  std::uint64_t seed = 0;
};

// Throws InvalidConfig: empty or out-of-range taus, empty model or encoding
// lists, dense without vectors.
void validate(const SweepConfig& cfg);

struct SweepRow {
  double tau = 0.0;
  EvalModel model = EvalModel::logreg;
  Encoding encoding = Encoding::tfidf;
  Metrics metrics;
  std::map<std::string, Metrics> per_topic;  // test set broken down by topic
  std::string hyperparameters;
  std::size_t n_labeled = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_discarded_neutral = 0;
};

// Rows ordered by tau ascending, then encoding, then model, in enum order.
struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;

  const SweepRow* find(double tau, EvalModel model, Encoding encoding) const;
};

// For each tau: relabel, drop NEUTRAL, split 80/20 stratified by
// (label, topic), train every model on every encoding and score the test
// part. `docs` must be index-aligned with `corpus.samples`.
// Throws InsufficientLabeled when a polarity has fewer than min_class_size
// labels at some tau; other errors propagate from labeling and training.
SweepResult threshold_sweep(const Corpus& corpus, const std::vector<CleanDoc>& docs,
                            const ScoreMap& scores, const SweepConfig& cfg);

}  // namespace tonebias
