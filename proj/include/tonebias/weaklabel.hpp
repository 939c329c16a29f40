#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tonebias/corpus.hpp"
#include "tonebias/preprocess.hpp"

namespace tonebias {

struct ToneScore {
  std::string id;
  double p_positive = 0.5;
};

using ScoreMap = std::unordered_map<std::string, ToneScore>;

// NEUTRAL is the abstention band below the confidence threshold.
enum class ToneLabel { positive, negative, neutral };

std::string_view to_string(ToneLabel label);

enum class ScorerKind { lexicon, external };

struct LabelingConfig {
  double tau = 0.60;
  ScorerKind scorer = ScorerKind::lexicon;
};

// Throws InvalidConfig unless 0.5 < tau <= 1.
void validate(const LabelingConfig& cfg);

class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  // Keys are lemmatized; when two keys share a lemma the first one wins.
  // Throws EmptyLexicon when no entries remain, InvalidConfig when one
  // polarity is missing or a weight is not finite.
  SentimentLexicon(const std::vector<std::pair<std::string, double>>& entries, double scale,
                   const Lemmatizer& lemmatizer = Lemmatizer::builtin());

  static SentimentLexicon from_text(std::string_view text, double scale = 1.0,
                                    const Lemmatizer& lemmatizer = Lemmatizer::builtin());
  static SentimentLexicon from_file(const std::filesystem::path& path, double scale = 1.0,
                                    const Lemmatizer& lemmatizer = Lemmatizer::builtin());
  static const SentimentLexicon& builtin();

  std::optional<double> weight(const std::string& token) const;
  double scale() const { return scale_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  // Same entries with every weight sign-flipped.
  SentimentLexicon negated() const;

 private:
  std::unordered_map<std::string, double> weights_;
  double scale_ = 1.0;
};

// Optional per-document logit perturbation, a deterministic function of the
// sample id and seed. Used to give desk-scale corpora a realistic share of
// low-confidence scores.
struct ScoreJitter {
  double sd = 0.0;
  std::uint64_t seed = 0;
};

// Sum of the weights of matched tokens s; p = sigmoid(k * s + jitter).
// Throws EmptyLexicon.
ToneScore lexicon_score(const CleanDoc& doc, const SentimentLexicon& lexicon,
                        const ScoreJitter& jitter = {});

// Scores JSONL (`{"id", "p_positive"}` per line). When `corpus` is given,
// every corpus id must be scored and no foreign ids may appear.
// Throws MalformedRecord, OutOfRange, DuplicateScore, MissingScore.
ScoreMap parse_external_scores(std::string_view content, const Corpus* corpus = nullptr);
ScoreMap load_external_scores(const std::filesystem::path& path, const Corpus* corpus = nullptr);

// Scores in corpus order, one JSON line each, in the external-score format.
std::string scores_to_jsonl(const Corpus& corpus, const ScoreMap& scores);

ToneLabel assign_label(double p_positive, const LabelingConfig& cfg);
inline ToneLabel assign_label(const ToneScore& s, const LabelingConfig& cfg) {
  return assign_label(s.p_positive, cfg);
}

struct LabeledDoc {
  std::string id;
  ToneLabel label = ToneLabel::neutral;
  double p_positive = 0.5;
};

struct LabelingResult {
  std::vector<LabeledDoc> labels;  // kept docs only, corpus order
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::size_t n_neutral = 0;
};

// `docs` must be index-aligned with `corpus.samples` (ArityMismatch
// otherwise). Throws MissingScore for a kept doc without a score.
LabelingResult label_corpus(const Corpus& corpus, const std::vector<CleanDoc>& docs,
                            const ScoreMap& scores, const LabelingConfig& cfg);

}  // namespace tonebias
