#pragma once

// Data-parallel inner loops. The functions in `kernels` run under OpenMP;
// `kernels::serial` holds the plain reference loops they are tested against.
//
// Reductions split the rows into a fixed number of contiguous blocks that
// does not depend on the thread count, and partial sums are combined in block
// order, so results are bit-identical for any number of threads.

#include <cstddef>
#include <span>
#include <vector>

#include "tonebias/corpus.hpp"
#include "tonebias/dataset.hpp"
#include "tonebias/features.hpp"
#include "tonebias/preprocess.hpp"
#include "tonebias/weaklabel.hpp"

namespace tonebias::kernels {

inline constexpr std::size_t kReductionBlocks = 32;

struct LogisticTerms {
  double objective = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// J(w, b) = l2/2 * |w|^2 + C * sum_i ln(1 + exp(-y_i (w.x_i + b))).
double logistic_objective(const Dataset& data, std::span<const double> w, double b, double C,
                          double l2);
LogisticTerms logistic_objective_grad(const Dataset& data, std::span<const double> w, double b,
                                      double C, double l2);

std::vector<double> margins(std::span<const SparseVector> rows, std::span<const double> w, double b);

std::vector<CleanDoc> clean_batch(std::span<const Sample> samples, const Lemmatizer& lemmatizer,
                                  LengthBounds bounds = {});
std::vector<ToneScore> lexicon_score_batch(std::span<const CleanDoc> docs,
                                           const SentimentLexicon& lexicon,
                                           const ScoreJitter& jitter = {});
std::vector<SparseVector> tfidf_batch(std::span<const CleanDoc> docs, const Vocabulary& vocab);
std::vector<SparseVector> count_batch(std::span<const CleanDoc> docs, const Vocabulary& vocab);
std::vector<DenseVector> mean_pool_batch(std::span<const CleanDoc> docs, const VectorTable& table);

namespace serial {

double logistic_objective(const Dataset& data, std::span<const double> w, double b, double C,
                          double l2);
LogisticTerms logistic_objective_grad(const Dataset& data, std::span<const double> w, double b,
                                      double C, double l2);
std::vector<double> margins(std::span<const SparseVector> rows, std::span<const double> w, double b);
std::vector<CleanDoc> clean_batch(std::span<const Sample> samples, const Lemmatizer& lemmatizer,
                                  LengthBounds bounds = {});
std::vector<ToneScore> lexicon_score_batch(std::span<const CleanDoc> docs,
                                           const SentimentLexicon& lexicon,
                                           const ScoreJitter& jitter = {});
std::vector<SparseVector> tfidf_batch(std::span<const CleanDoc> docs, const Vocabulary& vocab);
std::vector<DenseVector> mean_pool_batch(std::span<const CleanDoc> docs, const VectorTable& table);

}  // namespace serial

// Thread count for subsequent parallel regions; 0 keeps the runtime default.
void set_num_threads(int n);
int max_threads();

}  // namespace tonebias::kernels
