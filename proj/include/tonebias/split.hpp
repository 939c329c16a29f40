#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tonebias/dataset.hpp"

namespace tonebias {

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct SplitResult {
  std::vector<std::size_t> train;  // ascending item indices
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;  // singleton strata sent to train
};

// Items are grouped by their stratum key. Each stratum of size n contributes
// floor(n * f) or ceil(n * f) test items; the extra units go to the largest
// fractional parts so the global test count is round(N * f). Strata of a
// single item stay in train. Throws InvalidConfig unless 0 < f < 1.
SplitResult stratified_split(std::span<const std::string> strata, const SplitSpec& spec);

// Stratified by label only.
SplitResult stratified_split(std::span<const Polarity> labels, const SplitSpec& spec);

// Stratified fold assignment: per class, a seeded permutation dealt
// round-robin into `folds` folds. Returns the fold of each item.
std::vector<std::size_t> stratified_folds(std::span<const Polarity> labels, std::size_t folds,
                                          std::uint64_t seed);

}  // namespace tonebias
