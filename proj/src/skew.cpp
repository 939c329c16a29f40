#include "tonebias/skew.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include "tonebias/error.hpp"

namespace tonebias {

double binomial_two_sided_p(std::size_t k, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::NoConfidentLabels, "binomial test over zero trials");
  if (k > n) throw Error(ErrorCode::OutOfRange, "more successes than trials");
  const std::size_t m = std::max(k, n - k);
  // Terms are pmf(j) / pmf(mode), built outward from the mode by the ratio
  // recurrence so none of them overflows. Long double keeps tails of
  // n = 10^4 (around 1e-3000) representable until the final division.
  const std::size_t mode = n / 2;
  long double total = 1.0L;
  long double tail = m <= mode ? 1.0L : 0.0L;
  long double r = 1.0L;
  for (std::size_t j = mode; j < n; ++j) {
    r *= static_cast<long double>(n - j) / static_cast<long double>(j + 1);
    total += r;
    if (j + 1 >= m) tail += r;
  }
  r = 1.0L;
  for (std::size_t j = mode; j > 0; --j) {
    r *= static_cast<long double>(j) / static_cast<long double>(n - j + 1);
    total += r;
    if (j - 1 >= m) tail += r;
  }
  const long double p = 2.0L * tail / total;
  if (p >= 1.0L) return 1.0;
  const double out = static_cast<double>(p);
  return out > 0.0 ? out : std::numeric_limits<double>::denorm_min();
}

SkewReport skew_report(std::span<const ToneLabel> labels, double tau) {
  SkewReport r;
  r.tau = tau;
  for (ToneLabel l : labels) {
    switch (l) {
      case ToneLabel::positive: ++r.n_pos; break;
      case ToneLabel::negative: ++r.n_neg; break;
      case ToneLabel::neutral: ++r.n_neutral; break;
    }
  }
  const std::size_t n = r.n_pos + r.n_neg;
  if (n == 0) throw Error(ErrorCode::NoConfidentLabels, "no POSITIVE or NEGATIVE labels");
  r.skew = (static_cast<double>(r.n_pos) - static_cast<double>(r.n_neg)) / static_cast<double>(n);
  r.p_value = binomial_two_sided_p(r.n_pos, n);
  return r;
}

std::vector<SkewReport> skew_breakdown(const Corpus& corpus, const LabelingResult& labeled,
                                       double tau, const std::string& corpus_name) {
  std::unordered_map<std::string, const Sample*> by_id;
  for (const auto& s : corpus.samples) by_id.emplace(s.id, &s);

  std::vector<ToneLabel> all;
  std::map<std::string, std::vector<ToneLabel>> by_condition, by_topic;
  for (const auto& d : labeled.labels) {
    const auto it = by_id.find(d.id);
    if (it == by_id.end()) throw Error(ErrorCode::MissingScore, "label for unknown id " + d.id);
    all.push_back(d.label);
    by_condition[std::string(to_string(it->second->condition))].push_back(d.label);
    by_topic[it->second->topic].push_back(d.label);
  }

  std::vector<SkewReport> out;
  auto add = [&](const std::vector<ToneLabel>& group, const std::string& cond, const std::string& topic) {
    const bool confident = std::any_of(group.begin(), group.end(), [](ToneLabel l) { return l != ToneLabel::neutral; });
    if (!confident) return;
    SkewReport r = skew_report(group, tau);
    r.corpus = corpus_name;
    r.condition = cond;
    r.topic = topic;
    out.push_back(std::move(r));
  };
  add(all, "all", "all");
  for (const auto& [cond, group] : by_condition) add(group, cond, "all");
  for (const auto& [topic, group] : by_topic) add(group, "all", topic);
  return out;
}

}  // namespace tonebias
