#include "tonebias/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"

namespace tonebias {

namespace {

std::size_t parse_count(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedLine, where + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * dense[indices[k]];
  return s;
}

Vocabulary Vocabulary::fit(std::span<const CleanDoc> docs, std::size_t min_df) {
  std::map<std::string, std::size_t> df;
  std::size_t n = 0;
  for (const auto& doc : docs) {
    if (!doc.kept) continue;
    ++n;
    std::set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  if (n == 0) throw Error(ErrorCode::EmptyCorpus, "vocabulary needs at least one kept document");
  Vocabulary v;
  v.n_docs_ = n;
  for (auto& [term, count] : df) {
    if (count < min_df) continue;
    v.terms_.push_back(term);
    v.df_.push_back(count);
  }
  v.finalize();
  return v;
}

void Vocabulary::finalize() {
  index_.clear();
  idf_.resize(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    idf_[i] = std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(df_[i]))) + 1.0;
  }
}

Vocabulary Vocabulary::parse_dump(std::string_view text) {
  Vocabulary v;
  std::size_t start = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const auto cols = tokenize(line);
    if (cols.empty()) continue;
    const std::string where = "vocabulary line " + std::to_string(line_no);
    if (cols[0] == "#") {
      if (cols.size() == 3 && cols[1] == "n_docs") {
        v.n_docs_ = parse_count(cols[2], where);
        have_header = true;
        continue;
      }
      throw Error(ErrorCode::MalformedLine, where);
    }
    if (cols.size() != 3) throw Error(ErrorCode::MalformedLine, where);
    if (parse_count(cols[1], where) != v.terms_.size()) {
      throw Error(ErrorCode::MalformedLine, where + ": indices must be contiguous");
    }
    v.terms_.push_back(cols[0]);
    v.df_.push_back(parse_count(cols[2], where));
  }
  if (!have_header) throw Error(ErrorCode::MalformedLine, "vocabulary dump lacks '# n_docs' header");
  v.finalize();
  return v;
}

std::int64_t Vocabulary::index_of(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::string Vocabulary::dump() const {
  std::string out = "# n_docs " + std::to_string(n_docs_) + "\n";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    out += terms_[i] + " " + std::to_string(i) + " " + std::to_string(df_[i]) + "\n";
  }
  return out;
}

std::string Vocabulary::hash() const { return hex64(fnv1a64(dump())); }

namespace {

SparseVector counts(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<std::uint32_t> idx;
  idx.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto i = vocab.index_of(t);
    if (i >= 0) idx.push_back(static_cast<std::uint32_t>(i));
  }
  std::sort(idx.begin(), idx.end());
  SparseVector v;
  v.dim = vocab.size();
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t j = k;
    while (j < idx.size() && idx[j] == idx[k]) ++j;
    v.indices.push_back(idx[k]);
    v.values.push_back(static_cast<double>(j - k));
    k = j;
  }
  return v;
}

}  // namespace

SparseVector count_transform(std::span<const std::string> tokens, const Vocabulary& vocab) {
  return counts(tokens, vocab);
}

SparseVector tfidf_transform(std::span<const std::string> tokens, const Vocabulary& vocab) {
  SparseVector v = counts(tokens, vocab);
  for (std::size_t k = 0; k < v.nnz(); ++k) v.values[k] *= vocab.idf(v.indices[k]);
  const double n = v.norm();
  if (n > 0.0) {
    for (double& x : v.values) x /= n;
  }
  return v;
}

VectorTable VectorTable::parse(std::string_view text) {
  VectorTable table;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const auto cols = tokenize(line);
    if (cols.empty()) continue;
    const std::string where = "vector table line " + std::to_string(line_no);
    if (cols.size() < 2) throw Error(ErrorCode::MalformedLine, where + ": no values");
    std::vector<double> row;
    row.reserve(cols.size() - 1);
    for (std::size_t c = 1; c < cols.size(); ++c) {
      double x = 0.0;
      const auto& s = cols[c];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
        throw Error(ErrorCode::MalformedLine, where + ": bad value '" + s + "'");
      }
      row.push_back(x);
    }
    if (table.dim_ == 0) {
      table.dim_ = row.size();
    } else if (row.size() != table.dim_) {
      throw Error(ErrorCode::DimensionMismatch, where + ": expected " + std::to_string(table.dim_) +
                                                    " values, got " + std::to_string(row.size()));
    }
    table.rows_.insert_or_assign(cols[0], std::move(row));
  }
  if (table.rows_.empty()) throw Error(ErrorCode::EmptyTable, "vector table is empty");
  table.hash_ = hex64(fnv1a64(text));
  return table;
}

VectorTable VectorTable::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::span<const double> VectorTable::lookup(const std::string& term) const {
  auto it = rows_.find(term);
  if (it == rows_.end()) return {};
  return it->second;
}

DenseVector mean_pool(std::span<const std::string> tokens, const VectorTable& table) {
  DenseVector out(table.dim(), 0.0);
  // Summing in sorted token order makes the result independent of word order
  // down to the last bit.
  std::vector<std::string_view> sorted(tokens.begin(), tokens.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t matched = 0;
  for (auto t : sorted) {
    auto row = table.lookup(std::string(t));
    if (row.empty()) continue;
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += row[d];
    ++matched;
  }
  if (matched > 0) {
    for (double& x : out) x /= static_cast<double>(matched);
  }
  return out;
}

SparseVector to_sparse(const DenseVector& v) {
  SparseVector s;
  s.dim = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      s.indices.push_back(static_cast<std::uint32_t>(i));
      s.values.push_back(v[i]);
    }
  }
  return s;
}

SparseVector split_signs(const DenseVector& v) {
  SparseVector s;
  s.dim = 2 * v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) {
      s.indices.push_back(static_cast<std::uint32_t>(i));
      s.values.push_back(v[i]);
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) {
      s.indices.push_back(static_cast<std::uint32_t>(v.size() + i));
      s.values.push_back(-v[i]);
    }
  }
  return s;
}

}  // namespace tonebias
