#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <map>
#include <set>

#include "oracles.hpp"
#include "support.hpp"
#include "tonebias/corpus.hpp"
#include "tonebias/error.hpp"
#include "tonebias/features.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/kernels.hpp"
#include "tonebias/metrics.hpp"
#include "tonebias/report.hpp"
#include "tonebias/rng.hpp"
#include "tonebias/skew.hpp"
#include "tonebias/split.hpp"
#include "tonebias/sweep.hpp"
#include "tonebias/weaklabel.hpp"

using namespace tonebias;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

std::vector<Polarity> pols(std::initializer_list<int> v) {
  std::vector<Polarity> out;
  for (int x : v) out.push_back(x > 0 ? Polarity::positive : Polarity::negative);
  return out;
}

struct Pipeline {
  Corpus corpus;
  std::vector<CleanDoc> docs;
  ScoreMap scores;
};

Pipeline make_pipeline(std::size_t n, std::uint64_t seed, double sd) {
  Pipeline p;
  p.corpus = generate_synthetic(default_gen_spec(n, seed));
  p.docs = kernels::clean_batch(p.corpus.samples, Lemmatizer::builtin());
  const auto s = kernels::lexicon_score_batch(p.docs, SentimentLexicon::builtin(), {sd, seed});
  for (const auto& t : s) p.scores.emplace(t.id, t);
  return p;
}

VectorTable table_for(const std::vector<CleanDoc>& docs, std::size_t dim) {
  std::set<std::string> words;
  for (const auto& d : docs) words.insert(d.tokens.begin(), d.tokens.end());
  Rng rng(77);
  std::string text;
  for (const auto& w : words) {
    text += w;
    for (std::size_t k = 0; k < dim; ++k) text += " " + std::to_string(rng.uniform() * 2 - 1);
    text += "\n";
  }
  return VectorTable::parse(text);
}

}  // namespace

TEST_CASE("split: examples") {
  const std::vector<std::string> one(100, "a");
  const SplitResult r = stratified_split(one, {0.2, 1});
  CHECK(r.test.size() == 20);
  CHECK(r.train.size() == 80);

  std::vector<std::string> two(50, "pos");
  two.insert(two.end(), 50, "neg");
  const SplitResult s = stratified_split(two, {0.2, 2});
  std::size_t pos = 0;
  for (std::size_t i : s.test) pos += two[i] == "pos";
  CHECK(pos == 10);
  CHECK(s.test.size() == 20);
  const SplitResult again = stratified_split(two, {0.2, 2});
  CHECK(again.test == s.test);
  CHECK(again.train == s.train);

  const std::vector<std::string> lone = {"a", "a", "a", "a", "a", "b"};
  const SplitResult l = stratified_split(lone, {0.2, 3});
  CHECK(std::find(l.train.begin(), l.train.end(), 5u) != l.train.end());
  CHECK(l.warnings.size() == 1);
  CHECK(code_of([&] { stratified_split(one, {0.0, 1}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { stratified_split(one, {1.0, 1}); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("split: proportions on 50 random stratum configurations") {
  Rng rng(101);
  for (int config = 0; config < 50; ++config) {
    const std::size_t n_strata = 1 + rng.index(12);
    std::vector<std::string> strata;
    std::map<std::string, std::size_t> size;
    for (std::size_t s = 0; s < n_strata; ++s) {
      const std::size_t k = 2 + rng.index(200);
      const std::string key = "s" + std::to_string(s);
      size[key] = k;
      strata.insert(strata.end(), k, key);
    }
    std::vector<std::size_t> perm(strata.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<std::string> shuffled;
    for (std::size_t i : perm) shuffled.push_back(strata[i]);

    const SplitResult r = stratified_split(shuffled, {0.2, static_cast<std::uint64_t>(config)});
    std::vector<int> seen(shuffled.size(), 0);
    for (std::size_t i : r.train) ++seen[i];
    for (std::size_t i : r.test) ++seen[i];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
    CHECK(std::is_sorted(r.train.begin(), r.train.end()));
    CHECK(std::is_sorted(r.test.begin(), r.test.end()));

    std::map<std::string, std::size_t> test_count;
    for (std::size_t i : r.test) ++test_count[shuffled[i]];
    for (const auto& [key, k] : size) {
      CHECK(std::abs(static_cast<double>(test_count[key]) - 0.2 * static_cast<double>(k)) <= 1.0);
    }
    const double target = std::round(0.2 * static_cast<double>(shuffled.size()));
    CHECK(std::abs(static_cast<double>(r.test.size()) - target) <= 1.0);
  }
}

TEST_CASE("split: folds") {
  const auto y = pols({1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1});
  const auto f = stratified_folds(y, 3, 5);
  CHECK(f.size() == y.size());
  std::map<std::size_t, std::pair<int, int>> per;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == Polarity::positive ? per[f[i]].first : per[f[i]].second)++;
  for (const auto& [fold, c] : per) {
    CHECK(c.first >= 1);
    CHECK(c.first <= 2);
    CHECK(c.second >= 2);
    CHECK(c.second <= 3);
  }
  CHECK(stratified_folds(y, 3, 5) == f);
}

TEST_CASE("metrics: hand cases") {
  const auto perfect = pols({1, -1, 1, -1});
  const Metrics p = compute_metrics(perfect, perfect);
  CHECK(p.accuracy == 1.0);
  CHECK(p.macro_f1 == 1.0);

  const Metrics m = compute_metrics(pols({1, 1, -1, -1}), pols({1, -1, -1, -1}));
  CHECK(m.positive.f1 == doctest::Approx(2.0 / 3));
  CHECK(m.negative.f1 == doctest::Approx(0.8));
  CHECK(std::abs(m.macro_f1 - 0.7333) <= 1e-4);

  std::vector<Polarity> truth(90, Polarity::positive);
  truth.insert(truth.end(), 10, Polarity::negative);
  const std::vector<Polarity> all_pos(100, Polarity::positive);
  const Metrics g = compute_metrics(truth, all_pos);
  CHECK(g.accuracy == doctest::Approx(0.9));
  CHECK(g.negative.f1 == 0.0);
  CHECK(g.negative.precision == 0.0);
  CHECK(std::abs(g.positive.f1 - 0.9474) <= 1e-4);
  CHECK(std::abs(g.macro_f1 - 0.4737) <= 1e-4);

  CHECK(code_of([] { compute_metrics(pols({1}), pols({1, 1})); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { compute_metrics(std::vector<Polarity>{}, std::vector<Polarity>{}); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("metrics: brute-force confusion oracle on 1000 random vectors") {
  Rng rng(202);
  using tboracle::fraction;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(60);
    const double bias = rng.uniform();
    std::vector<Polarity> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = rng.uniform() < bias ? Polarity::positive : Polarity::negative;
      p[i] = rng.uniform() < 0.5 ? Polarity::positive : Polarity::negative;
    }
    long long tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool tt = t[i] == Polarity::positive, pp = p[i] == Polarity::positive;
      tp += tt && pp;
      tn += !tt && !pp;
      fp += !tt && pp;
      fn += tt && !pp;
    }
    const Metrics m = compute_metrics(t, p);
    CHECK(m.confusion[1][1] == static_cast<std::size_t>(tp));
    CHECK(m.confusion[0][0] == static_cast<std::size_t>(tn));
    CHECK(m.confusion[0][1] == static_cast<std::size_t>(fp));
    CHECK(m.confusion[1][0] == static_cast<std::size_t>(fn));
    CHECK(m.n == n);
    CHECK(m.accuracy == fraction(tp + tn, static_cast<long long>(n)));
    CHECK(m.positive.precision == fraction(tp, tp + fp));
    CHECK(m.positive.recall == fraction(tp, tp + fn));
    CHECK(m.negative.precision == fraction(tn, tn + fn));
    CHECK(m.negative.recall == fraction(tn, tn + fp));
    const double f1p = fraction(2 * tp, 2 * tp + fp + fn);
    const double f1n = fraction(2 * tn, 2 * tn + fn + fp);
    CHECK(m.positive.f1 == f1p);
    CHECK(m.negative.f1 == f1n);
    CHECK(m.macro_f1 == (f1p + f1n) / 2);
  }
}

TEST_CASE("skew: binomial p-value against a big-integer oracle") {
  Rng rng(303);
  std::vector<std::pair<std::size_t, std::size_t>> cases = {
      {0, 1}, {1, 1}, {1, 2}, {5, 10}, {0, 30}, {90, 100}, {10, 100}, {5000, 10000}, {5100, 10000},
      {5300, 10000}, {10000, 10000}, {0, 10000}, {4900, 9999}};
  for (int i = 0; i < 150; ++i) {
    const std::size_t n = 1 + rng.index(i < 120 ? 1000 : 10000);
    const std::size_t mid = n / 2;
    const std::size_t spread = std::max<std::size_t>(1, static_cast<std::size_t>(4 * std::sqrt(double(n))));
    std::size_t k = mid + rng.index(spread);
    if (k > n) k = n;
    cases.emplace_back(rng.uniform() < 0.5 ? k : n - k, n);
  }
  for (const auto& [k, n] : cases) {
    const double got = binomial_two_sided_p(k, n);
    const double want = tboracle::binomial_two_sided(k, n);
    CAPTURE(k);
    CAPTURE(n);
    CHECK(got > 0.0);
    CHECK(got <= 1.0);
    CHECK(std::abs(got - want) <= 1e-12);
    if (want > 0.0) {
      CHECK(std::abs(got - want) <= 1e-12 * want);
    } else {
      // Below the double range: the smallest positive value keeps p in (0, 1].
      CHECK(got == std::numeric_limits<double>::denorm_min());
    }
  }
  CHECK(code_of([] { binomial_two_sided_p(0, 0); }) == ErrorCode::NoConfidentLabels);
  CHECK(code_of([] { binomial_two_sided_p(5, 4); }) == ErrorCode::OutOfRange);
}

TEST_CASE("skew: report examples and antisymmetry") {
  auto labels = [](std::size_t pos, std::size_t neg, std::size_t neu) {
    std::vector<ToneLabel> v(pos, ToneLabel::positive);
    v.insert(v.end(), neg, ToneLabel::negative);
    v.insert(v.end(), neu, ToneLabel::neutral);
    return v;
  };
  const auto even = skew_report(labels(50, 50, 7), 0.6);
  CHECK(even.skew == 0.0);
  CHECK(std::abs(even.p_value - tboracle::binomial_two_sided(50, 100)) <= 1e-12);
  CHECK(even.p_value == 1.0);
  CHECK(even.n_neutral == 7);
  CHECK(even.tau == 0.6);

  const auto lop = skew_report(labels(90, 10, 0), 0.85);
  CHECK(lop.skew == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(lop.p_value < 1e-15);
  CHECK(lop.p_value > 0.0);

  Rng rng(404);
  for (int i = 0; i < 200; ++i) {
    const std::size_t a = rng.index(300), b = rng.index(300);
    if (a + b == 0) continue;
    const auto r = skew_report(labels(a, b, 0), 0.7);
    const auto s = skew_report(labels(b, a, 0), 0.7);
    CHECK(r.skew == -s.skew);
    CHECK(r.p_value == s.p_value);
    CHECK(r.skew >= -1.0);
    CHECK(r.skew <= 1.0);
  }
  CHECK(code_of([&] { skew_report(labels(0, 0, 5), 0.6); }) == ErrorCode::NoConfidentLabels);
}

TEST_CASE("skew: breakdown by condition and topic") {
  const Pipeline p = make_pipeline(300, 9, 0.0);
  const LabelingResult l = label_corpus(p.corpus, p.docs, p.scores, {0.6});
  const auto b = skew_breakdown(p.corpus, l, 0.6, "synthetic");
  REQUIRE(!b.empty());
  CHECK(b[0].condition == "all");
  CHECK(b[0].topic == "all");
  CHECK(b[0].n_pos == l.n_positive);
  CHECK(b[0].n_neg == l.n_negative);
  CHECK(b[0].n_neutral == l.n_neutral);
  std::size_t cond_pos = 0, topic_pos = 0;
  for (const auto& r : b) {
    CHECK(r.corpus == "synthetic");
    if (r.condition != "all") cond_pos += r.n_pos;
    if (r.topic != "all") topic_pos += r.n_pos;
    if (r.condition == "positive") CHECK(r.skew > 0.9);
    if (r.condition == "negative") CHECK(r.skew < -0.9);
  }
  CHECK(cond_pos == l.n_positive);
  CHECK(topic_pos == l.n_positive);
}

TEST_CASE("sweep: arity, monotone labeled sets, determinism") {
  const Pipeline p = make_pipeline(400, 5, 1.0);
  SweepConfig cfg;
  cfg.taus = {0.6};
  cfg.seed = 5;
  const SweepResult one = threshold_sweep(p.corpus, p.docs, p.scores, cfg);
  CHECK(one.rows.size() == cfg.models.size() * cfg.encodings.size());

  cfg.taus = {0.9, 0.6, 0.75};
  const SweepResult r = threshold_sweep(p.corpus, p.docs, p.scores, cfg);
  REQUIRE(r.rows.size() == 3 * cfg.models.size());
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    CHECK(r.rows[i - 1].tau <= r.rows[i].tau);
    if (r.rows[i - 1].tau < r.rows[i].tau) {
      CHECK(r.rows[i - 1].n_labeled >= r.rows[i].n_labeled);
      CHECK(r.rows[i - 1].n_discarded_neutral <= r.rows[i].n_discarded_neutral);
    }
  }
  for (const auto& row : r.rows) {
    CHECK(row.n_train + row.n_test == row.n_labeled);
    CHECK(row.n_labeled + row.n_discarded_neutral <= p.corpus.size());
    CHECK(row.metrics.n == row.n_test);
    std::size_t topic_n = 0;
    for (const auto& [topic, m] : row.per_topic) topic_n += m.n;
    CHECK(topic_n == row.n_test);
    CHECK(!row.hyperparameters.empty());
  }
  CHECK(r.find(0.75, EvalModel::vote, Encoding::tfidf) != nullptr);
  CHECK(r.find(0.8, EvalModel::vote, Encoding::tfidf) == nullptr);

  const SweepResult again = threshold_sweep(p.corpus, p.docs, p.scores, cfg);
  CHECK(metrics_csv(again) == metrics_csv(r));
}

TEST_CASE("sweep: insufficient labels and config errors") {
  Pipeline p = make_pipeline(200, 6, 0.0);
  for (auto& [id, s] : p.scores) s.p_positive = 0.45 + 0.1 * static_cast<double>(fnv1a64(id) % 1000) / 1000.0;
  SweepConfig cfg;
  cfg.taus = {0.999};
  CHECK(code_of([&] { threshold_sweep(p.corpus, p.docs, p.scores, cfg); }) == ErrorCode::InsufficientLabeled);

  SweepConfig bad;
  bad.taus = {};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidConfig);
  bad.taus = {0.5};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidConfig);
  bad = SweepConfig{};
  bad.vote_weights = {0.2, 0.2};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::WeightSimplexViolation);
  bad.vote_weights = {0.2, 0.3, 0.5};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::ArityMismatch);
  bad = SweepConfig{};
  bad.encodings = {Encoding::dense};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("report: arity, empty skew list, byte-identical reruns") {
  const Pipeline p = make_pipeline(300, 8, 1.0);
  const VectorTable table = table_for(p.docs, 8);
  SweepConfig cfg;
  cfg.models = {EvalModel::mnb, EvalModel::logreg, EvalModel::svm, EvalModel::vote};
  cfg.encodings = {Encoding::tfidf, Encoding::dense};
  cfg.vectors = &table;
  cfg.seed = 8;
  const SweepResult r = threshold_sweep(p.corpus, p.docs, p.scores, cfg);
  CHECK(r.rows.size() == 16);

  const std::string csv = metrics_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
  CHECK(csv.rfind("tau,model,encoding,accuracy,precision_pos,recall_pos,f1_pos,precision_neg,recall_neg,"
                  "f1_neg,macro_f1,n_train,n_test,n_discarded_neutral\n",
                  0) == 0);
  CHECK(skew_json({}) == "[]\n");

  const LabelingResult l = label_corpus(p.corpus, p.docs, p.scores, {0.6});
  const auto skews = skew_breakdown(p.corpus, l, 0.6, "synthetic");
  const auto parsed = nlohmann::json::parse(skew_json(skews));
  CHECK(parsed.size() == skews.size());
  CHECK(parsed[0]["corpus"] == "synthetic");

  tbtest::TempDir a, b;
  const auto ma = emit_report(r, skews, a.path());
  const auto mb = emit_report(r, skews, b.path());
  REQUIRE(ma.size() == 4);
  for (std::size_t i = 0; i < ma.size(); ++i) {
    CHECK(ma[i].file == mb[i].file);
    CHECK(ma[i].hash == mb[i].hash);
    CHECK(ma[i].bytes == mb[i].bytes);
    CHECK(read_file(a / ma[i].file) == read_file(b / mb[i].file));
    CHECK(ma[i].hash == hex64(fnv1a64(read_file(a / ma[i].file))));
  }
  const std::string md = read_file(a / "report.md");
  CHECK(md.find("macro-F1") != std::string::npos);
}
