#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>

#include "deepfeat/core/error.hpp"
#include "deepfeat/tensor/activation_tensor.hpp"

namespace deepfeat {

inline constexpr std::size_t kUniformLbpBins = 59;  // 58 uniform patterns + one shared nonuniform bin
inline constexpr std::size_t kNonuniformLbpBin = 58;

// Circular 0/1 transitions of an 8-bit pattern.
constexpr int lbp_transitions(std::uint8_t pattern) {
  const auto rotated = static_cast<std::uint8_t>((pattern >> 1) | (pattern << 7));
  return std::popcount(static_cast<unsigned>(pattern ^ rotated));
}

// pattern -> histogram bin; uniform patterns numbered by ascending value.
inline constexpr std::array<std::uint8_t, 256> kUniformLbpTable = [] {
  std::array<std::uint8_t, 256> table{};
  std::uint8_t next = 0;
  for (int p = 0; p < 256; ++p)
    table[static_cast<std::size_t>(p)] =
        lbp_transitions(static_cast<std::uint8_t>(p)) <= 2 ? next++ : static_cast<std::uint8_t>(kNonuniformLbpBin);
  return table;
}();

// LBP(8,1) code at an interior pixel. Bit n is set when neighbor n >= center;
// neighbor 0 is east, then counter-clockwise (NE, N, NW, W, SW, S, SE).
template <typename T>
std::uint8_t lbp_code(ChannelMap<T> map, std::size_t i, std::size_t j) {
  static constexpr int kDi[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  static constexpr int kDj[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  const T center = map(i, j);
  std::uint8_t code = 0;
  for (int n = 0; n < 8; ++n) {
    const T neighbor = map(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + kDi[n]),
                           static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + kDj[n]));
    if (neighbor - center >= T{0}) code |= static_cast<std::uint8_t>(1u << n);
  }
  return code;
}

// Uniform-LBP histogram over the interior pixels, normalized to sum 1.
template <typename T>
std::array<double, kUniformLbpBins> lbp_histogram(ChannelMap<T> map) {
  if (map.rows < 3 || map.cols < 3)
    throw ArgumentError("LBP needs a map of at least 3x3, got " + std::to_string(map.rows) + "x" +
                        std::to_string(map.cols));
  std::array<double, kUniformLbpBins> hist{};
  for (std::size_t i = 1; i + 1 < map.rows; ++i)
    for (std::size_t j = 1; j + 1 < map.cols; ++j) hist[kUniformLbpTable[lbp_code(map, i, j)]] += 1.0;
  const double interior = static_cast<double>((map.rows - 2) * (map.cols - 2));
  for (auto& h : hist) h /= interior;
  return hist;
}

}  // namespace deepfeat
