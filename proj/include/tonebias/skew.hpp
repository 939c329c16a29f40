#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tonebias/corpus.hpp"
#include "tonebias/weaklabel.hpp"

namespace tonebias {

struct SkewReport {
  std::string corpus;
  std::string condition = "all";
  std::string topic = "all";
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t n_neutral = 0;
  double skew = 0.0;     // (n_pos - n_neg) / (n_pos + n_neg)
  double p_value = 1.0;  // two-sided exact binomial test against rate 1/2
  double tau = 0.0;
};

// min(1, 2 P(X >= max(k, n - k))) for X ~ Binomial(n, 1/2). Values below the
// smallest positive double are reported as that double. Requires n >= 1.
double binomial_two_sided_p(std::size_t k, std::size_t n);

// Throws NoConfidentLabels when no label is POSITIVE or NEGATIVE.
SkewReport skew_report(std::span<const ToneLabel> labels, double tau);

// One report over the whole labeled set, then one per condition and one per
// topic (groups without confident labels are skipped). `labeled` holds the
// kept docs of `corpus` in corpus order.
std::vector<SkewReport> skew_breakdown(const Corpus& corpus, const LabelingResult& labeled,
                                       double tau, const std::string& corpus_name);

}  // namespace tonebias
