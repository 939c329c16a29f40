#include "tonebias/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/rng.hpp"

namespace tonebias {

SplitResult stratified_split(std::span<const std::string> strata, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "test_fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);

  SplitResult result;
  struct Quota {
    const std::string* key;
    std::vector<std::size_t>* members;
    std::size_t take;
    double frac;
    bool eligible;
  };
  std::vector<Quota> quotas;
  std::size_t floors = 0;
  for (auto& [key, members] : groups) {
    if (members.size() == 1) {
      result.warnings.push_back("EmptyStratum: stratum '" + key + "' has one item; kept in train");
      quotas.push_back({&key, &members, 0, 0.0, false});
      continue;
    }
    const double q = static_cast<double>(members.size()) * spec.test_fraction;
    const auto take = static_cast<std::size_t>(std::floor(q));
    quotas.push_back({&key, &members, take, q - std::floor(q), true});
    floors += take;
  }
  const auto target =
      static_cast<std::size_t>(std::llround(static_cast<double>(strata.size()) * spec.test_fraction));
  std::vector<std::size_t> order(quotas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return quotas[a].frac > quotas[b].frac; });
  std::size_t leftover = target > floors ? target - floors : 0;
  for (std::size_t k : order) {
    if (leftover == 0) break;
    if (!quotas[k].eligible || quotas[k].frac <= 0.0) continue;
    ++quotas[k].take;
    --leftover;
  }

  for (auto& q : quotas) {
    std::vector<std::size_t> members = *q.members;
    Rng rng(mix64(spec.seed ^ fnv1a64(*q.key)));
    rng.shuffle(members);
    result.test.insert(result.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(q.take));
    result.train.insert(result.train.end(), members.begin() + static_cast<std::ptrdiff_t>(q.take), members.end());
  }
  std::sort(result.train.begin(), result.train.end());
  std::sort(result.test.begin(), result.test.end());
  return result;
}

SplitResult stratified_split(std::span<const Polarity> labels, const SplitSpec& spec) {
  std::vector<std::string> keys;
  keys.reserve(labels.size());
  for (auto y : labels) keys.emplace_back(y == Polarity::positive ? "+" : "-");
  return stratified_split(keys, spec);
}

std::vector<std::size_t> stratified_folds(std::span<const Polarity> labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "need at least two folds");
  std::vector<std::size_t> fold(labels.size(), 0);
  for (Polarity c : {Polarity::negative, Polarity::positive}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    Rng rng(mix64(seed + static_cast<std::uint64_t>(c == Polarity::positive)));
    rng.shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) fold[members[k]] = k % folds;
  }
  return fold;
}

}  // namespace tonebias
