#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepfeat/core/error.hpp"

namespace deepfeat {

enum class WilcoxonMethod { Exact, NormalApproximation };

inline std::string_view wilcoxon_method_name(WilcoxonMethod m) {
  return m == WilcoxonMethod::Exact ? "exact" : "normal-approximation";
}

struct WilcoxonResult {
  std::size_t n_effective = 0;
  double w = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;  // two-sided
  WilcoxonMethod method = WilcoxonMethod::Exact;
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;

// Paired two-sided signed-rank test. Zero differences are dropped, tied |d| share
// their average rank. Up to `exact_limit` non-zero pairs the null distribution is
// counted over all 2^n sign assignments (as a subset-sum table over doubled ranks);
// beyond that a normal approximation with tie and continuity corrections is used.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                           std::size_t exact_limit = kWilcoxonExactLimit) {
  if (a.size() != b.size())
    throw ArgumentError("wilcoxon: paired samples differ in length (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  if (a.empty()) throw ArgumentError("wilcoxon: empty input");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (const double d = a[i] - b[i]; d != 0.0) diffs.push_back(d);

  WilcoxonResult res;
  res.n_effective = diffs.size();
  const std::size_t n = diffs.size();
  if (n == 0) return res;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });

  // Doubled ranks are integers even with ties: a group spanning positions p..q gets p + q.
  std::vector<std::uint64_t> rank2(n);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && std::abs(diffs[order[hi + 1]]) == std::abs(diffs[order[lo]])) ++hi;
    for (std::size_t t = lo; t <= hi; ++t) rank2[order[t]] = (lo + 1) + (hi + 1);
    tie_sizes.push_back(hi - lo + 1);
    lo = hi + 1;
  }

  std::uint64_t plus2 = 0, minus2 = 0;
  for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0 ? plus2 : minus2) += rank2[i];
  res.w_plus = static_cast<double>(plus2) / 2.0;
  res.w_minus = static_cast<double>(minus2) / 2.0;
  const std::uint64_t w2 = std::min(plus2, minus2);
  res.w = static_cast<double>(w2) / 2.0;

  if (n <= exact_limit) {
    res.method = WilcoxonMethod::Exact;
    const std::uint64_t total2 = plus2 + minus2;
    std::vector<double> ways(total2 + 1, 0.0);  // counts up to 2^25 are exact in a double
    ways[0] = 1.0;
    std::uint64_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      reach += rank2[i];
      for (std::uint64_t s = reach + 1; s-- > rank2[i];) ways[s] += ways[s - rank2[i]];
    }
    double tail = 0.0;
    for (std::uint64_t s = 0; s <= w2; ++s) tail += ways[s];
    res.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
  } else {
    res.method = WilcoxonMethod::NormalApproximation;
    const auto nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    double tie_term = 0.0;
    for (auto t : tie_sizes) tie_term += std::pow(static_cast<double>(t), 3) - static_cast<double>(t);
    const double sd = std::sqrt(nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0);
    const double z = std::max(0.0, std::abs(res.w - mean) - 0.5) / sd;
    res.p_value = std::clamp(std::erfc(z / std::numbers::sqrt2), std::numeric_limits<double>::min(), 1.0);
  }
  return res;
}

}  // namespace deepfeat
