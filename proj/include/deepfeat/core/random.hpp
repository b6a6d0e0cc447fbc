#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace deepfeat {

// std::mt19937_64's output sequence is fixed by the standard, but the
// distributions and std::shuffle are not. Everything below is built on the raw
// engine so results are identical across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derive an independent stream seed from a base seed and a list of tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
  return h;
}

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Standard normal via Box-Muller (one draw per call, the sine half discarded).
inline double standard_normal(Rng& rng) {
  double u1;
  do {
    u1 = uniform01(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace deepfeat
