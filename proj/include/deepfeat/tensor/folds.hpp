#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/random.hpp"

namespace deepfeat {

struct FoldSpec {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // per-sample fold index in [0, k)
  std::vector<std::string> warnings;

  [[nodiscard]] std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == fold) out.push_back(i);
    return out;
  }
  [[nodiscard]] std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] != fold) out.push_back(i);
    return out;
  }
};

namespace detail {

inline std::map<std::size_t, std::vector<std::size_t>> members_by_class(std::span<const std::size_t> labels) {
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  return by_class;
}

}  // namespace detail

// Each class is shuffled and dealt round-robin; the deal position carries over
// between classes so overall fold sizes stay balanced too.
inline FoldSpec stratified_folds(std::span<const std::size_t> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("fold count must be >= 2, got " + std::to_string(k));
  FoldSpec spec;
  spec.k = k;
  spec.assignment.assign(labels.size(), 0);
  Rng rng(seed);
  std::size_t offset = 0;
  for (auto& [cls, members] : detail::members_by_class(labels)) {
    if (members.size() < k)
      spec.warnings.push_back("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                              " samples, fewer than " + std::to_string(k) + " folds");
    shuffle(std::span<std::size_t>(members), rng);
    for (std::size_t i = 0; i < members.size(); ++i) spec.assignment[members[i]] = (offset + i) % k;
    offset = (offset + members.size()) % k;
  }
  return spec;
}

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Per class, round(fraction * count) samples go to validation, kept within
// [1, count - 1] so both sides see every class with >= 2 members.
inline HoldoutSplit stratified_holdout(std::span<const std::size_t> labels, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("holdout fraction must lie in (0, 1)");
  HoldoutSplit split;
  Rng rng(seed);
  for (auto& [cls, members] : detail::members_by_class(labels)) {
    shuffle(std::span<std::size_t>(members), rng);
    std::size_t n_val = 0;
    if (members.size() >= 2)
      n_val = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(fraction * members.size())), 1,
                                      members.size() - 1);
    split.validation.insert(split.validation.end(), members.begin(), members.begin() + n_val);
    split.train.insert(split.train.end(), members.begin() + n_val, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

}  // namespace deepfeat
