#include "tonebias/kernels.hpp"
#include "tonebias/mathutil.hpp"

namespace tonebias::kernels::serial {

double logistic_objective(const Dataset& data, std::span<const double> w, double b, double C,
                          double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    loss += softplus(-sign(data.y[i]) * (data.rows[i].dot(w) + b));
  }
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return 0.5 * l2 * reg + C * loss;
}

LogisticTerms logistic_objective_grad(const Dataset& data, std::span<const double> w, double b,
                                      double C, double l2) {
  LogisticTerms out;
  out.grad_w.assign(w.size(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const SparseVector& x = data.rows[i];
    const double y = sign(data.y[i]);
    const double ym = y * (x.dot(w) + b);
    loss += softplus(-ym);
    const double coef = -y * sigmoid(-ym);
    for (std::size_t t = 0; t < x.nnz(); ++t) out.grad_w[x.indices[t]] += C * coef * x.values[t];
    out.grad_b += C * coef;
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    reg += w[j] * w[j];
    out.grad_w[j] += l2 * w[j];
  }
  out.objective = 0.5 * l2 * reg + C * loss;
  return out;
}

std::vector<double> margins(std::span<const SparseVector> rows, std::span<const double> w, double b) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.dot(w) + b);
  return out;
}

std::vector<CleanDoc> clean_batch(std::span<const Sample> samples, const Lemmatizer& lemmatizer,
                                  LengthBounds bounds) {
  std::vector<CleanDoc> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(clean_response(s, lemmatizer, bounds));
  return out;
}

std::vector<ToneScore> lexicon_score_batch(std::span<const CleanDoc> docs,
                                           const SentimentLexicon& lexicon,
                                           const ScoreJitter& jitter) {
  std::vector<ToneScore> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(lexicon_score(d, lexicon, jitter));
  return out;
}

std::vector<SparseVector> tfidf_batch(std::span<const CleanDoc> docs, const Vocabulary& vocab) {
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(tfidf_transform(d.tokens, vocab));
  return out;
}

std::vector<DenseVector> mean_pool_batch(std::span<const CleanDoc> docs, const VectorTable& table) {
  std::vector<DenseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(mean_pool(d.tokens, table));
  return out;
}

}  // namespace tonebias::kernels::serial
