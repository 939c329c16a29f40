#include <omp.h>

#include <algorithm>

#include "tonebias/kernels.hpp"
#include "tonebias/mathutil.hpp"

namespace tonebias::kernels {

namespace {

struct Blocks {
  std::size_t count;
  std::size_t size;
  std::size_t begin(std::size_t k) const { return k * size; }
  std::size_t end(std::size_t k, std::size_t n) const { return std::min(n, (k + 1) * size); }
};

Blocks make_blocks(std::size_t n) {
  const std::size_t count = std::max<std::size_t>(1, std::min(n, kReductionBlocks));
  return {count, (n + count - 1) / std::max<std::size_t>(count, 1)};
}

double l2_term(std::span<const double> w, double l2) {
  if (l2 == 0.0) return 0.0;
  double s = 0.0;
  for (double v : w) s += v * v;
  return 0.5 * l2 * s;
}

// omp loops need signed induction variables on older runtimes.
using idx_t = long long;

}  // namespace

double logistic_objective(const Dataset& data, std::span<const double> w, double b, double C,
                          double l2) {
  const std::size_t n = data.size();
  const Blocks blocks = make_blocks(n);
  std::vector<double> partial(blocks.count, 0.0);
#pragma omp parallel for schedule(static)
  for (idx_t k = 0; k < static_cast<idx_t>(blocks.count); ++k) {
    double s = 0.0;
    for (std::size_t i = blocks.begin(k); i < blocks.end(k, n); ++i) {
      const double m = data.rows[i].dot(w) + b;
      s += softplus(-sign(data.y[i]) * m);
    }
    partial[k] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return l2_term(w, l2) + C * total;
}

LogisticTerms logistic_objective_grad(const Dataset& data, std::span<const double> w, double b,
                                      double C, double l2) {
  const std::size_t n = data.size();
  const std::size_t dim = w.size();
  const Blocks blocks = make_blocks(n);
  std::vector<double> obj(blocks.count, 0.0);
  std::vector<double> gb(blocks.count, 0.0);
  std::vector<double> gw(blocks.count * dim, 0.0);
#pragma omp parallel for schedule(static)
  for (idx_t k = 0; k < static_cast<idx_t>(blocks.count); ++k) {
    double* g = gw.data() + static_cast<std::size_t>(k) * dim;
    double s = 0.0;
    double sb = 0.0;
    for (std::size_t i = blocks.begin(k); i < blocks.end(k, n); ++i) {
      const SparseVector& x = data.rows[i];
      const double y = sign(data.y[i]);
      const double ym = y * (x.dot(w) + b);
      s += softplus(-ym);
      // d/dm softplus(-y m) = -y * sigmoid(-y m)
      const double coef = -y * sigmoid(-ym);
      for (std::size_t t = 0; t < x.nnz(); ++t) g[x.indices[t]] += coef * x.values[t];
      sb += coef;
    }
    obj[k] = s;
    gb[k] = sb;
  }
  LogisticTerms out;
  out.grad_w.assign(dim, 0.0);
  double total = 0.0;
  double total_b = 0.0;
  for (std::size_t k = 0; k < blocks.count; ++k) {
    total += obj[k];
    total_b += gb[k];
    const double* g = gw.data() + k * dim;
    for (std::size_t j = 0; j < dim; ++j) out.grad_w[j] += g[j];
  }
  for (std::size_t j = 0; j < dim; ++j) out.grad_w[j] = C * out.grad_w[j] + l2 * w[j];
  out.grad_b = C * total_b;
  out.objective = l2_term(w, l2) + C * total;
  return out;
}

std::vector<double> margins(std::span<const SparseVector> rows, std::span<const double> w, double b) {
  std::vector<double> out(rows.size());
#pragma omp parallel for schedule(static)
  for (idx_t i = 0; i < static_cast<idx_t>(rows.size()); ++i) out[i] = rows[i].dot(w) + b;
  return out;
}

std::vector<CleanDoc> clean_batch(std::span<const Sample> samples, const Lemmatizer& lemmatizer,
                                  LengthBounds bounds) {
  validate(bounds);
  std::vector<CleanDoc> out(samples.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (idx_t i = 0; i < static_cast<idx_t>(samples.size()); ++i) {
    out[i] = clean_response(samples[i], lemmatizer, bounds);
  }
  return out;
}

std::vector<ToneScore> lexicon_score_batch(std::span<const CleanDoc> docs,
                                           const SentimentLexicon& lexicon,
                                           const ScoreJitter& jitter) {
  std::vector<ToneScore> out(docs.size());
  if (docs.empty()) return out;
  // Surface EmptyLexicon outside the parallel region.
  out[0] = lexicon_score(docs[0], lexicon, jitter);
#pragma omp parallel for schedule(dynamic, 64)
  for (idx_t i = 1; i < static_cast<idx_t>(docs.size()); ++i) {
    out[i] = lexicon_score(docs[i], lexicon, jitter);
  }
  return out;
}

std::vector<SparseVector> tfidf_batch(std::span<const CleanDoc> docs, const Vocabulary& vocab) {
  std::vector<SparseVector> out(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (idx_t i = 0; i < static_cast<idx_t>(docs.size()); ++i) {
    out[i] = tfidf_transform(docs[i].tokens, vocab);
  }
  return out;
}

std::vector<SparseVector> count_batch(std::span<const CleanDoc> docs, const Vocabulary& vocab) {
  std::vector<SparseVector> out(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (idx_t i = 0; i < static_cast<idx_t>(docs.size()); ++i) {
    out[i] = count_transform(docs[i].tokens, vocab);
  }
  return out;
}

std::vector<DenseVector> mean_pool_batch(std::span<const CleanDoc> docs, const VectorTable& table) {
  std::vector<DenseVector> out(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (idx_t i = 0; i < static_cast<idx_t>(docs.size()); ++i) {
    out[i] = mean_pool(docs[i].tokens, table);
  }
  return out;
}

void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace tonebias::kernels
