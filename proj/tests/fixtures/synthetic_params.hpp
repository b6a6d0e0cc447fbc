#pragma once

// Parameters of the committed synthetic data set. Class c raises every channel k
// with k % 3 == c by kSeparation standard deviations.

#include <array>
#include <cstddef>
#include <cstdint>

namespace fixture {

struct SyntheticLayer {
  const char* id;
  std::uint32_t d, m, n;
  std::size_t index;
};

inline constexpr std::uint64_t kSyntheticSeed = 1;
inline constexpr std::size_t kSyntheticSamples = 60;
inline constexpr std::size_t kSyntheticClasses = 3;
inline constexpr double kSeparation = 5.0;
inline constexpr std::array<SyntheticLayer, 3> kSyntheticLayers = {{
    {"conv3", 8, 6, 6, 3},
    {"conv4", 12, 4, 4, 4},
    {"fc5", 16, 1, 1, 5},
}};

inline constexpr std::uint64_t kSffsSeedBase = 1000;
inline constexpr std::size_t kSffsTrials = 50;

}  // namespace fixture
