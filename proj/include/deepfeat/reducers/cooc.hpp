#pragma once

#include <cstddef>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/tensor/activation_tensor.hpp"

namespace deepfeat {

// Same layout as ActivationTensor (channel-major) but double precision.
struct CoocTensor {
  TensorShape shape;
  std::vector<double> values;

  [[nodiscard]] double at(std::size_t c, std::size_t i, std::size_t j) const {
    return values[(c * shape.height + i) * shape.width + j];
  }
};

// Deep co-occurrence tensor. Elements above the tensor-wide mean are kept (mask rho);
// each kept element receives the windowed sum of kept activations over all channels,
// with the own channel weighted by `epsilon` and every other channel by 1. Zero padding.
inline CoocTensor cooc_tensor(const ActivationTensor& activation, std::size_t radius = 1, double epsilon = 0.0) {
  if (radius == 0) throw ArgumentError("co-occurrence radius must be >= 1");
  const auto& shape = activation.shape();
  const std::size_t d = shape.channels, m = shape.height, n = shape.width;
  const auto values = activation.values();

  double mean = 0.0;
  for (float v : values) mean += static_cast<double>(v);
  mean /= static_cast<double>(values.size());

  std::vector<double> kept(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    kept[i] = static_cast<double>(values[i]) > mean ? static_cast<double>(values[i]) : 0.0;

  // Separable box sums per channel: rows first, then columns.
  const auto r = static_cast<std::ptrdiff_t>(radius);
  std::vector<double> row_pass(values.size(), 0.0), box(values.size(), 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t base = c * m * n;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::ptrdiff_t dj = -r; dj <= r; ++dj) {
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (jj >= 0 && jj < static_cast<std::ptrdiff_t>(n)) acc += kept[base + i * n + static_cast<std::size_t>(jj)];
        }
        row_pass[base + i * n + j] = acc;
      }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::ptrdiff_t di = -r; di <= r; ++di) {
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          if (ii >= 0 && ii < static_cast<std::ptrdiff_t>(m)) acc += row_pass[base + static_cast<std::size_t>(ii) * n + j];
        }
        box[base + i * n + j] = acc;
      }
  }

  std::vector<double> all_channels(m * n, 0.0);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t p = 0; p < m * n; ++p) all_channels[p] += box[c * m * n + p];

  CoocTensor out{shape, std::vector<double>(values.size(), 0.0)};
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t p = 0; p < m * n; ++p) {
      const std::size_t idx = c * m * n + p;
      if (static_cast<double>(values[idx]) > mean)
        out.values[idx] = (all_channels[p] - box[idx]) + epsilon * box[idx];
    }
  return out;
}

// One value per channel: the spatial sum of that channel.
inline std::vector<double> cooc_channel_values(const CoocTensor& cooc) {
  const std::size_t map = cooc.shape.map_size();
  std::vector<double> out(cooc.shape.channels, 0.0);
  for (std::size_t c = 0; c < out.size(); ++c)
    for (std::size_t p = 0; p < map; ++p) out[c] += cooc.values[c * map + p];
  return out;
}

}  // namespace deepfeat
