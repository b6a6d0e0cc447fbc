#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "deepfeat/tensor/activation_tensor.hpp"

namespace deepfeat {

inline constexpr std::size_t kEntropyBins = 256;

// Entropy (natural log) of the map's 256-bin histogram after min-max scaling to
// [0, 255]. A constant map puts all its mass in bin 0.
template <typename T>
double gep_value(std::span<const T> map) {
  if (map.empty()) return 0.0;
  const auto [lo_it, hi_it] = std::minmax_element(map.begin(), map.end());
  const double lo = static_cast<double>(*lo_it);
  const double hi = static_cast<double>(*hi_it);
  if (!(hi > lo)) return 0.0;
  std::array<std::size_t, kEntropyBins> hist{};
  for (const T v : map) {
    const double scaled = (static_cast<double>(v) - lo) / (hi - lo) * 255.0;
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(std::max(scaled, 0.0)), kEntropyBins - 1);
    ++hist[bin];
  }
  double entropy = 0.0;
  const double total = static_cast<double>(map.size());
  for (const auto count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / total;
    entropy -= p * std::log(p);
  }
  return entropy;
}

template <typename T>
double gep_value(ChannelMap<T> map) {
  return gep_value(map.data);
}

// Per channel, the fraction of elements strictly below the tensor-wide mean.
inline std::vector<double> gmtp_values(const ActivationTensor& activation) {
  const auto values = activation.values();
  double threshold = 0.0;
  for (float v : values) threshold += static_cast<double>(v);
  threshold /= static_cast<double>(values.size());

  const std::size_t map = activation.shape().map_size();
  std::vector<double> out(activation.channels(), 0.0);
  for (std::size_t c = 0; c < out.size(); ++c) {
    std::size_t below = 0;
    for (const float v : activation.channel(c))
      if (static_cast<double>(v) < threshold) ++below;
    out[c] = static_cast<double>(below) / static_cast<double>(map);
  }
  return out;
}

}  // namespace deepfeat
