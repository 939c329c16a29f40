#include <doctest.h>

#include <cmath>
#include <set>

#include <json.hpp>

#include "support.hpp"
#include "tonebias/corpus.hpp"
#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/rng.hpp"
#include "tonebias/weaklabel.hpp"

using namespace tonebias;

namespace {

CleanDoc doc_of(std::vector<std::string> tokens, std::string id = "d") {
  CleanDoc d;
  d.id = std::move(id);
  d.raw_len = tokens.size();
  d.tokens = std::move(tokens);
  d.kept = true;
  return d;
}

const SentimentLexicon& toy_lexicon() {
  static const SentimentLexicon lex({{"great", 2.0}, {"awful", -2.0}, {"fine", 0.5}}, 1.0);
  return lex;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

Corpus two_sample_corpus() {
  Corpus c;
  c.samples.push_back({"a", "t", "q", "r", Condition::neutral, ""});
  c.samples.push_back({"b", "t", "q", "r", Condition::neutral, ""});
  return c;
}

}  // namespace

TEST_CASE("lexicon score: examples") {
  CHECK(lexicon_score(doc_of({"nothing", "here"}), toy_lexicon()).p_positive == 0.5);
  CHECK(lexicon_score(doc_of({"great"}), toy_lexicon()).p_positive == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
  CHECK(lexicon_score(doc_of({"great"}), toy_lexicon()).p_positive == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(lexicon_score(doc_of({"great", "awful"}), toy_lexicon()).p_positive == 0.5);
  const SentimentLexicon steep({{"great", 2.0}, {"awful", -2.0}}, 3.0);
  CHECK(lexicon_score(doc_of({"great"}), steep).p_positive == doctest::Approx(1.0 / (1.0 + std::exp(-6.0))));
}

TEST_CASE("lexicon score: negating every weight maps p to 1 - p exactly") {
  const auto& lex = SentimentLexicon::builtin();
  const SentimentLexicon neg = lex.negated();
  const Corpus c = generate_synthetic(default_gen_spec(300, 4));
  for (const auto& s : c.samples) {
    const CleanDoc d = clean_response(s, Lemmatizer::builtin());
    const double p = lexicon_score(d, lex).p_positive;
    const double q = lexicon_score(d, neg).p_positive;
    CHECK(q == 1.0 - p);
  }
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double w = (rng.uniform() - 0.5) * 80.0;
    const SentimentLexicon a({{"x", w}, {"y", -1.0}, {"z", 1.0}}, 1.0);
    CHECK(lexicon_score(doc_of({"x"}), a.negated()).p_positive == 1.0 - lexicon_score(doc_of({"x"}), a).p_positive);
  }
}

TEST_CASE("lexicon score: jitter is deterministic per id and seed") {
  const ScoreJitter j{1.0, 42};
  const CleanDoc a = doc_of({"great"}, "id-a");
  const CleanDoc b = doc_of({"great"}, "id-b");
  CHECK(lexicon_score(a, toy_lexicon(), j).p_positive == lexicon_score(a, toy_lexicon(), j).p_positive);
  CHECK(lexicon_score(a, toy_lexicon(), j).p_positive != lexicon_score(b, toy_lexicon(), j).p_positive);
  CHECK(lexicon_score(a, toy_lexicon(), j).p_positive != lexicon_score(a, toy_lexicon(), {1.0, 43}).p_positive);
  // The logit perturbation is roughly standard normal across ids.
  double sum = 0.0, sq = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double p = lexicon_score(doc_of({}, "n" + std::to_string(i)), toy_lexicon(), j).p_positive;
    const double z = std::log(p / (1.0 - p));
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.1);
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.1);
}

TEST_CASE("lexicon construction and parsing") {
  CHECK(code_of([] { SentimentLexicon({}, 1.0); }) == ErrorCode::EmptyLexicon);
  CHECK(code_of([] { SentimentLexicon({{"good", 1.0}}, 1.0); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { SentimentLexicon({{"good", 1.0}, {"bad", -1.0}}, 0.0); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { SentimentLexicon({{"good", NAN}, {"bad", -1.0}}, 1.0); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { SentimentLexicon::from_text("good\n"); }) == ErrorCode::MalformedLine);
  CHECK(code_of([] { SentimentLexicon::from_text("good 1 2\n"); }) == ErrorCode::MalformedLine);
  CHECK(code_of([] { SentimentLexicon::from_text("# only comments\n"); }) == ErrorCode::EmptyLexicon);
  CHECK(code_of([] { lexicon_score(doc_of({"x"}), SentimentLexicon{}); }) == ErrorCode::EmptyLexicon);

  const SentimentLexicon lex = SentimentLexicon::from_text("# c\nHelping 1.5\nhelps 9\nFailed -2\n");
  CHECK(lex.size() == 2);
  CHECK(lex.weight("help") == 1.5);  // lemmatized key, first entry wins
  CHECK(lex.weight("fail") == -2.0);
  CHECK_FALSE(lex.weight("helping").has_value());
  CHECK(SentimentLexicon::builtin().size() >= 150);
}

TEST_CASE("assign_label: examples and mutual exclusion") {
  CHECK(assign_label(0.90, {0.85}) == ToneLabel::positive);
  CHECK(assign_label(0.70, {0.85}) == ToneLabel::neutral);
  CHECK(assign_label(0.70, {0.60}) == ToneLabel::positive);
  CHECK(assign_label(0.30, {0.60}) == ToneLabel::negative);
  CHECK(assign_label(0.60, {0.60}) == ToneLabel::positive);  // inclusive
  CHECK(assign_label(0.5, {0.60}) == ToneLabel::neutral);
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.uniform();
    const double tau = 0.5 + 0.5 * rng.uniform() + 1e-12;
    const bool pos = p >= tau;
    const bool neg = 1.0 - p >= tau;
    CHECK_FALSE((pos && neg));
    const ToneLabel l = assign_label(p, {tau});
    CHECK(l == (pos ? ToneLabel::positive : neg ? ToneLabel::negative : ToneLabel::neutral));
  }
}

TEST_CASE("labeling config requires tau in (0.5, 1]") {
  CHECK(code_of([] { validate(LabelingConfig{0.5}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { validate(LabelingConfig{0.4}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { validate(LabelingConfig{1.01}); }) == ErrorCode::InvalidConfig);
  CHECK_NOTHROW(validate(LabelingConfig{1.0}));
}

TEST_CASE("external scores: parsing and validation") {
  const ScoreMap ok = parse_external_scores(
      "{\"id\":\"a\",\"p_positive\":0.1}\n{\"id\":\"b\",\"p_positive\":1}\n{\"id\":\"c\",\"p_positive\":0}\n");
  CHECK(ok.size() == 3);
  CHECK(ok.at("a").p_positive == 0.1);
  CHECK(code_of([] { parse_external_scores("{\"id\":\"a\",\"p_positive\":1.3}\n"); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { parse_external_scores("{\"id\":\"a\",\"p_positive\":-0.1}\n"); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { parse_external_scores("{\"id\":\"a\"}\n"); }) == ErrorCode::MalformedRecord);
  CHECK(code_of([] { parse_external_scores("{\"id\":1,\"p_positive\":0.5}\n"); }) == ErrorCode::MalformedRecord);
  CHECK(code_of([] { parse_external_scores("nope\n"); }) == ErrorCode::MalformedRecord);
  CHECK(code_of([] {
          parse_external_scores("{\"id\":\"a\",\"p_positive\":0.5}\n{\"id\":\"a\",\"p_positive\":0.6}\n");
        }) == ErrorCode::DuplicateScore);

  const Corpus c = two_sample_corpus();
  try {
    parse_external_scores("{\"id\":\"a\",\"p_positive\":0.5}\n", &c);
    FAIL("expected MissingScore");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingScore);
    CHECK(std::string(e.what()) == "b");
  }
  CHECK(code_of([&] {
          parse_external_scores(
              "{\"id\":\"a\",\"p_positive\":0.5}\n{\"id\":\"b\",\"p_positive\":0.5}\n{\"id\":\"z\",\"p_positive\":0.5}\n", &c);
        }) == ErrorCode::MalformedRecord);
}

TEST_CASE("external scores: writer output round-trips through the loader") {
  tbtest::TempDir dir;
  const Corpus c = generate_synthetic(default_gen_spec(50, 8));
  ScoreMap scores;
  Rng rng(9);
  for (const auto& s : c.samples) scores[s.id] = {s.id, rng.uniform()};
  write_file(dir / "s.jsonl", scores_to_jsonl(c, scores));
  const ScoreMap back = load_external_scores(dir / "s.jsonl", &c);
  REQUIRE(back.size() == scores.size());
  for (const auto& [id, s] : scores) CHECK(back.at(id).p_positive == s.p_positive);
  // One line per sample, corpus order.
  const std::string text = read_file(dir / "s.jsonl");
  std::size_t pos = 0;
  for (const auto& s : c.samples) {
    const auto line_end = text.find('\n', pos);
    const auto j = nlohmann::json::parse(text.substr(pos, line_end - pos));
    CHECK(j["id"] == s.id);
    pos = line_end + 1;
  }
}

TEST_CASE("label_corpus: neutral band, order, counts and errors") {
  const Corpus c = two_sample_corpus();
  std::vector<CleanDoc> docs = {doc_of({"x", "y", "z"}, "a"), doc_of({"x", "y", "z"}, "b")};
  ScoreMap half{{"a", {"a", 0.5}}, {"b", {"b", 0.5}}};
  const auto all_neutral = label_corpus(c, docs, half, {0.6});
  CHECK(all_neutral.n_neutral == 2);
  CHECK(all_neutral.labels[0].id == "a");
  CHECK(all_neutral.labels[1].id == "b");

  ScoreMap partial{{"a", {"a", 0.9}}};
  CHECK(code_of([&] { label_corpus(c, docs, partial, {0.6}); }) == ErrorCode::MissingScore);
  // Dropped docs need no score.
  docs[1].kept = false;
  const auto one = label_corpus(c, docs, partial, {0.6});
  CHECK(one.labels.size() == 1);
  CHECK(one.n_positive == 1);
  docs.pop_back();
  CHECK(code_of([&] { label_corpus(c, docs, partial, {0.6}); }) == ErrorCode::ArityMismatch);
  CHECK(code_of([&] { label_corpus(c, {}, partial, {0.3}); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("label_corpus: raising tau only shrinks the confident set") {
  const Corpus c = generate_synthetic(default_gen_spec(800, 12));
  std::vector<CleanDoc> docs;
  for (const auto& s : c.samples) docs.push_back(clean_response(s, Lemmatizer::builtin()));
  ScoreMap scores;
  for (const auto& d : docs) scores[d.id] = lexicon_score(d, SentimentLexicon::builtin(), {1.0, 12});
  const double taus[] = {0.51, 0.6, 0.7, 0.85, 0.95, 1.0};
  for (std::size_t k = 0; k + 1 < std::size(taus); ++k) {
    const auto lo = label_corpus(c, docs, scores, {taus[k]});
    const auto hi = label_corpus(c, docs, scores, {taus[k + 1]});
    CHECK(hi.n_positive + hi.n_negative <= lo.n_positive + lo.n_negative);
    for (std::size_t i = 0; i < hi.labels.size(); ++i) {
      if (hi.labels[i].label != ToneLabel::neutral) CHECK(lo.labels[i].label == hi.labels[i].label);
    }
  }
}

TEST_CASE("label_corpus: generator conditions agree with lexicon labels") {
  const Corpus c = generate_synthetic(default_gen_spec(1000, 13));
  std::vector<CleanDoc> docs;
  for (const auto& s : c.samples) docs.push_back(clean_response(s, Lemmatizer::builtin()));
  ScoreMap scores;
  for (const auto& d : docs) scores[d.id] = lexicon_score(d, SentimentLexicon::builtin());
  const auto res = label_corpus(c, docs, scores, {0.6});
  std::size_t agree = 0;
  for (std::size_t i = 0; i < res.labels.size(); ++i) {
    const Condition cond = c.samples[i].condition;
    agree += (cond == Condition::positive && res.labels[i].label == ToneLabel::positive) ||
             (cond == Condition::negative && res.labels[i].label == ToneLabel::negative);
  }
  CHECK(static_cast<double>(agree) / static_cast<double>(res.labels.size()) >= 0.95);
}

TEST_CASE("neutral template responses score exactly one half") {
  GenSpec s = default_gen_spec(300, 14);
  s.condition_mix = {{Condition::neutral, 1.0}};
  for (const auto& sample : generate_synthetic(s).samples) {
    const CleanDoc d = clean_response(sample, Lemmatizer::builtin());
    CHECK_MESSAGE(lexicon_score(d, SentimentLexicon::builtin()).p_positive == 0.5, sample.response_text);
  }
}
