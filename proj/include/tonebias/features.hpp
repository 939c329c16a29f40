#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tonebias/preprocess.hpp"

namespace tonebias {

// Sorted (index, value) pairs of a vector with `dim` entries.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  double norm() const;
  double dot(std::span<const double> dense) const;
  bool operator==(const SparseVector&) const = default;
};

using DenseVector = std::vector<double>;

class Vocabulary {
 public:
  // Fitted on kept documents only. Terms are indexed in lexicographic order.
  // Throws EmptyCorpus when no kept document is given.
  static Vocabulary fit(std::span<const CleanDoc> docs, std::size_t min_df = 1);

  // Reads the `term index df` dump plus its `# n_docs N` header line.
  static Vocabulary parse_dump(std::string_view text);

  std::size_t size() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t df(std::size_t index) const { return df_[index]; }
  double idf(std::size_t index) const { return idf_[index]; }

  // -1 when the term is out of vocabulary.
  std::int64_t index_of(const std::string& term) const;

  std::string dump() const;
  std::string hash() const;

  bool operator==(const Vocabulary& o) const {
    return terms_ == o.terms_ && df_ == o.df_ && n_docs_ == o.n_docs_;
  }

 private:
  void finalize();

  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t n_docs_ = 0;
};

// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1, then L2-normalized.
// Out-of-vocabulary tokens are dropped; a doc with none in vocabulary maps to
// the zero vector.
SparseVector tfidf_transform(std::span<const std::string> tokens, const Vocabulary& vocab);

// Raw term counts, for naive Bayes on counts.
SparseVector count_transform(std::span<const std::string> tokens, const Vocabulary& vocab);

class VectorTable {
 public:
  // `term v1 ... vd` per line. Throws EmptyTable, MalformedLine,
  // DimensionMismatch.
  static VectorTable parse(std::string_view text);
  static VectorTable load(const std::filesystem::path& path);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  // Empty span when the term is absent.
  std::span<const double> lookup(const std::string& term) const;
  std::string hash() const { return hash_; }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> rows_;
  std::string hash_;
};

// Mean of the in-table token vectors, counting repeats; zero vector when no
// token matches.
DenseVector mean_pool(std::span<const std::string> tokens, const VectorTable& table);

SparseVector to_sparse(const DenseVector& v);

// [max(v, 0), max(-v, 0)]: a nonnegative 2d encoding of a signed vector so
// count-based models can consume dense embeddings.
SparseVector split_signs(const DenseVector& v);

}  // namespace tonebias
