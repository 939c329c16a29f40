#include "tonebias/weaklabel.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/mathutil.hpp"
#include "tonebias/rng.hpp"
#include "tonebias_data.hpp"

namespace tonebias {

std::string_view to_string(ToneLabel label) {
  switch (label) {
    case ToneLabel::positive: return "POSITIVE";
    case ToneLabel::negative: return "NEGATIVE";
    case ToneLabel::neutral: return "NEUTRAL";
  }
  return "NEUTRAL";
}

void validate(const LabelingConfig& cfg) {
  if (!(cfg.tau > 0.5 && cfg.tau <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "tau must satisfy 0.5 < tau <= 1 (got " + std::to_string(cfg.tau) + ")");
  }
}

SentimentLexicon::SentimentLexicon(const std::vector<std::pair<std::string, double>>& entries,
                                   double scale, const Lemmatizer& lemmatizer)
    : scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::InvalidConfig, "lexicon scale must be positive");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& [token, w] : entries) {
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidConfig, "non-finite weight for '" + token + "'");
    const auto norm = tokenize(normalize(token));
    if (norm.size() != 1) continue;
    if (weights_.emplace(lemmatizer.lemma(norm.front()), w).second) {
      has_pos |= w > 0.0;
      has_neg |= w < 0.0;
    }
  }
  if (weights_.empty()) throw Error(ErrorCode::EmptyLexicon, "lexicon has no entries");
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::InvalidConfig, "lexicon needs at least one positive and one negative entry");
  }
}

SentimentLexicon SentimentLexicon::from_text(std::string_view text, double scale,
                                             const Lemmatizer& lemmatizer) {
  std::vector<std::pair<std::string, double>> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string token;
    double w = 0.0;
    if (!(ls >> token)) continue;
    std::string extra;
    if (!(ls >> w) || (ls >> extra)) {
      throw Error(ErrorCode::MalformedLine, "lexicon line " + std::to_string(line_no) + ": expected 'token weight'");
    }
    entries.emplace_back(std::move(token), w);
  }
  return SentimentLexicon(entries, scale, lemmatizer);
}

SentimentLexicon SentimentLexicon::from_file(const std::filesystem::path& path, double scale,
                                             const Lemmatizer& lemmatizer) {
  return from_text(read_file(path), scale, lemmatizer);
}

const SentimentLexicon& SentimentLexicon::builtin() {
  static const SentimentLexicon lex = from_text(data::kLexicon, 1.0);
  return lex;
}

std::optional<double> SentimentLexicon::weight(const std::string& token) const {
  if (auto it = weights_.find(token); it != weights_.end()) return it->second;
  return std::nullopt;
}

SentimentLexicon SentimentLexicon::negated() const {
  SentimentLexicon out = *this;
  for (auto& [t, w] : out.weights_) w = -w;
  return out;
}

ToneScore lexicon_score(const CleanDoc& doc, const SentimentLexicon& lexicon,
                        const ScoreJitter& jitter) {
  if (lexicon.empty()) throw Error(ErrorCode::EmptyLexicon, "lexicon has no entries");
  double s = 0.0;
  for (const auto& t : doc.tokens) {
    if (auto w = lexicon.weight(t)) s += *w;
  }
  double z = lexicon.scale() * s;
  if (jitter.sd > 0.0) {
    const std::uint64_t h = mix64(fnv1a64(doc.id) ^ mix64(jitter.seed));
    z += jitter.sd * normal_from_bits(h, mix64(h));
  }
  return {doc.id, sigmoid(z)};
}

ScoreMap parse_external_scores(std::string_view content, const Corpus* corpus) {
  ScoreMap scores;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "scores line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedRecord, where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("p_positive") || !obj["p_positive"].is_number()) {
      throw Error(ErrorCode::MalformedRecord, where + ": expected {\"id\": str, \"p_positive\": float}");
    }
    ToneScore s{obj["id"].get<std::string>(), obj["p_positive"].get<double>()};
    if (!(s.p_positive >= 0.0 && s.p_positive <= 1.0)) {
      throw Error(ErrorCode::OutOfRange, where + ": p_positive=" + std::to_string(s.p_positive));
    }
    const std::string id = s.id;
    if (!scores.emplace(id, std::move(s)).second) throw Error(ErrorCode::DuplicateScore, id);
  }
  if (corpus != nullptr) {
    std::unordered_set<std::string_view> ids;
    for (const auto& sample : corpus->samples) {
      if (!scores.contains(sample.id)) throw Error(ErrorCode::MissingScore, sample.id);
      ids.insert(sample.id);
    }
    if (ids.size() != scores.size()) {
      for (const auto& [id, s] : scores) {
        if (!ids.contains(id)) throw Error(ErrorCode::MalformedRecord, "score for unknown id '" + id + "'");
      }
    }
  }
  return scores;
}

ScoreMap load_external_scores(const std::filesystem::path& path, const Corpus* corpus) {
  return parse_external_scores(read_file(path), corpus);
}

std::string scores_to_jsonl(const Corpus& corpus, const ScoreMap& scores) {
  std::string out;
  for (const auto& sample : corpus.samples) {
    auto it = scores.find(sample.id);
    if (it == scores.end()) continue;
    nlohmann::ordered_json j;
    j["id"] = sample.id;
    j["p_positive"] = it->second.p_positive;
    out += j.dump();
    out += '\n';
  }
  return out;
}

ToneLabel assign_label(double p_positive, const LabelingConfig& cfg) {
  if (p_positive >= cfg.tau) return ToneLabel::positive;
  if (1.0 - p_positive >= cfg.tau) return ToneLabel::negative;
  return ToneLabel::neutral;
}

LabelingResult label_corpus(const Corpus& corpus, const std::vector<CleanDoc>& docs,
                            const ScoreMap& scores, const LabelingConfig& cfg) {
  validate(cfg);
  if (docs.size() != corpus.samples.size()) {
    throw Error(ErrorCode::ArityMismatch, "cleaned documents do not align with the corpus");
  }
  LabelingResult result;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const CleanDoc& doc = docs[i];
    if (doc.id != corpus.samples[i].id) {
      throw Error(ErrorCode::ArityMismatch, "document '" + doc.id + "' is out of corpus order");
    }
    if (!doc.kept) continue;
    auto it = scores.find(doc.id);
    if (it == scores.end()) throw Error(ErrorCode::MissingScore, doc.id);
    const double p = it->second.p_positive;
    const ToneLabel label = assign_label(p, cfg);
    switch (label) {
      case ToneLabel::positive: ++result.n_positive; break;
      case ToneLabel::negative: ++result.n_negative; break;
      case ToneLabel::neutral: ++result.n_neutral; break;
    }
    result.labels.push_back({doc.id, label, p});
  }
  return result;
}

}  // namespace tonebias
