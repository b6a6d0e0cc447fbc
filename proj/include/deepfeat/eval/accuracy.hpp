#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "deepfeat/core/error.hpp"

namespace deepfeat {

inline double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size())
    throw ArgumentError("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                        std::to_string(truth.size()) + " labels");
  if (truth.empty()) throw ArgumentError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace deepfeat
