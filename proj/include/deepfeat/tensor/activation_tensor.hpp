#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepfeat/core/error.hpp"

namespace deepfeat {

struct TensorShape {
  std::uint32_t channels = 1;
  std::uint32_t height = 1;
  std::uint32_t width = 1;

  [[nodiscard]] std::size_t map_size() const { return std::size_t{height} * width; }
  [[nodiscard]] std::size_t size() const { return std::size_t{channels} * map_size(); }
  [[nodiscard]] std::string str() const {
    return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
  }

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

// Read-only view of one M x N map stored row-major.
template <typename T>
struct ChannelMap {
  std::span<const T> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  ChannelMap() = default;
  ChannelMap(std::span<const T> values, std::size_t r, std::size_t c) : data(values), rows(r), cols(c) {
    if (values.size() != r * c)
      throw ArgumentError("channel map of " + std::to_string(r) + "x" + std::to_string(c) + " needs " +
                          std::to_string(r * c) + " values, got " + std::to_string(values.size()));
  }

  [[nodiscard]] T operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  [[nodiscard]] std::size_t size() const { return data.size(); }
};

// One sample's activations at one layer: D channels of M x N, channel-major.
class ActivationTensor {
 public:
  ActivationTensor() = default;

  ActivationTensor(TensorShape shape, std::vector<float> values) : shape_(shape), values_(std::move(values)) {
    if (shape_.channels == 0 || shape_.height == 0 || shape_.width == 0)
      throw ValidationError("tensor dims must be >= 1, got " + shape_.str());
    if (values_.size() != shape_.size())
      throw ValidationError("tensor " + shape_.str() + " needs " + std::to_string(shape_.size()) + " values, got " +
                            std::to_string(values_.size()));
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!std::isfinite(values_[i]))
        throw ValidationError("non-finite value at element offset " + std::to_string(i));
  }

  [[nodiscard]] const TensorShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t channels() const { return shape_.channels; }
  [[nodiscard]] std::size_t height() const { return shape_.height; }
  [[nodiscard]] std::size_t width() const { return shape_.width; }
  [[nodiscard]] std::span<const float> values() const { return values_; }

  [[nodiscard]] std::span<const float> channel(std::size_t c) const {
    return std::span<const float>(values_).subspan(c * shape_.map_size(), shape_.map_size());
  }
  [[nodiscard]] ChannelMap<float> channel_map(std::size_t c) const {
    return ChannelMap<float>(channel(c), shape_.height, shape_.width);
  }
  [[nodiscard]] float at(std::size_t c, std::size_t i, std::size_t j) const {
    return values_[(c * shape_.height + i) * shape_.width + j];
  }

 private:
  TensorShape shape_{};
  std::vector<float> values_ = std::vector<float>(1, 0.0f);
};

// Channel-major concatenation: channel c occupies [c*M*N, (c+1)*M*N).
inline std::vector<float> flatten(const ActivationTensor& tensor) {
  return {tensor.values().begin(), tensor.values().end()};
}

inline ActivationTensor reshape(std::span<const float> flat, TensorShape shape) {
  return ActivationTensor(shape, std::vector<float>(flat.begin(), flat.end()));
}

}  // namespace deepfeat
