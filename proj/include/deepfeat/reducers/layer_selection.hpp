#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "deepfeat/core/error.hpp"

namespace deepfeat {

inline constexpr std::size_t kReductionThreshold = 5000;
inline constexpr std::size_t kTotalFeatureBudget = 1000;

// 1-based layer indices: every `stride`-th layer from the middle one, plus the last `tail`.
inline std::vector<std::size_t> select_layers(std::size_t layer_count, std::size_t stride = 10, std::size_t tail = 4) {
  if (layer_count == 0) throw ArgumentError("layer count must be >= 1");
  if (stride == 0) throw ArgumentError("stride must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t i = (layer_count + 1) / 2; i <= layer_count; i += stride) out.push_back(i);
  const std::size_t first_tail = layer_count > tail ? layer_count - tail + 1 : 1;
  for (std::size_t i = first_tail; i <= layer_count && tail > 0; ++i) out.push_back(i);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool needs_reduction(std::size_t flattened_dim, std::size_t threshold = kReductionThreshold) {
  return flattened_dim > threshold;
}

// Features kept per channel for local-scope methods, never below one.
inline std::size_t channel_budget(std::size_t channel_count, std::size_t total = kTotalFeatureBudget) {
  if (channel_count == 0) throw ArgumentError("channel count must be >= 1");
  return std::max<std::size_t>(1, total / channel_count);
}

}  // namespace deepfeat
