// Serial reference loops against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "tonebias/corpus.hpp"
#include "tonebias/features.hpp"
#include "tonebias/kernels.hpp"
#include "tonebias/rng.hpp"
#include "tonebias/weaklabel.hpp"

using namespace tonebias;

namespace {

const Corpus& corpus() {
  static const Corpus c = generate_synthetic(default_gen_spec(4000, 1));
  return c;
}

const std::vector<CleanDoc>& docs() {
  static const auto d = kernels::serial::clean_batch(corpus().samples, Lemmatizer::builtin());
  return d;
}

const Vocabulary& vocab() {
  static const Vocabulary v = Vocabulary::fit(docs());
  return v;
}

const Dataset& dataset() {
  static const Dataset d = [] {
    Dataset out;
    out.rows = kernels::serial::tfidf_batch(docs(), vocab());
    out.dim = vocab().size();
    for (const auto& s : corpus().samples) {
      out.y.push_back(s.condition == Condition::positive ? Polarity::positive : Polarity::negative);
    }
    return out;
  }();
  return d;
}

std::vector<double> weights() {
  Rng rng(2);
  std::vector<double> w(dataset().dim);
  for (auto& v : w) v = rng.normal();
  return w;
}

void BM_CleanSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::clean_batch(corpus().samples, Lemmatizer::builtin()));
}
void BM_CleanParallel(benchmark::State& state) {
  kernels::set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::clean_batch(corpus().samples, Lemmatizer::builtin()));
}

void BM_ScoreSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::serial::lexicon_score_batch(docs(), SentimentLexicon::builtin(), {1.0, 3}));
  }
}
void BM_ScoreParallel(benchmark::State& state) {
  kernels::set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::lexicon_score_batch(docs(), SentimentLexicon::builtin(), {1.0, 3}));
  }
}

void BM_TfidfSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::tfidf_batch(docs(), vocab()));
}
void BM_TfidfParallel(benchmark::State& state) {
  kernels::set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::tfidf_batch(docs(), vocab()));
}

void BM_LogisticGradSerial(benchmark::State& state) {
  const auto w = weights();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::logistic_objective_grad(dataset(), w, 0.1, 1.0, 1.0));
}
void BM_LogisticGradParallel(benchmark::State& state) {
  kernels::set_num_threads(static_cast<int>(state.range(0)));
  const auto w = weights();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::logistic_objective_grad(dataset(), w, 0.1, 1.0, 1.0));
}

}  // namespace

BENCHMARK(BM_CleanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CleanParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TfidfSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TfidfParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogisticGradSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogisticGradParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
