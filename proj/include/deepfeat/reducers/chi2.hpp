#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/matrix.hpp"

namespace deepfeat {

inline constexpr std::size_t kChi2Bins = 10;

// Equal-width bin index over [lo, hi]; the maximum falls in the last bin.
inline std::size_t equal_width_bin(double x, double lo, double hi, std::size_t bins) {
  const double t = (x - lo) / (hi - lo) * static_cast<double>(bins);
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(t), bins - 1);
}

// Chi-square statistic between a discretized feature and the class labels, summed
// over the non-empty cells' rows and columns of the (bin x class) contingency table.
template <typename Column>
double chi2_score(const Column& feature, std::span<const std::size_t> labels, std::size_t bins = kChi2Bins) {
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(feature.size()) != n)
    throw ArgumentError("chi2: feature has " + std::to_string(feature.size()) + " values, labels " + std::to_string(n));
  if (bins == 0) throw ArgumentError("chi2: bin count must be >= 1");
  if (n < 2) return 0.0;
  double lo = static_cast<double>(feature[0]);
  double hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    lo = std::min(lo, static_cast<double>(feature[i]));
    hi = std::max(hi, static_cast<double>(feature[i]));
  }
  if (!(hi > lo)) return 0.0;

  const std::size_t classes = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> observed(bins * classes, 0.0);
  std::vector<double> row_total(bins, 0.0);
  std::vector<double> col_total(classes, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = equal_width_bin(static_cast<double>(feature[i]), lo, hi, bins);
    observed[b * classes + labels[i]] += 1.0;
    row_total[b] += 1.0;
    col_total[labels[i]] += 1.0;
  }
  double chi2 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (row_total[b] == 0.0) continue;
    for (std::size_t c = 0; c < classes; ++c) {
      if (col_total[c] == 0.0) continue;
      const double expected = row_total[b] * col_total[c] / static_cast<double>(n);
      const double diff = observed[b * classes + c] - expected;
      chi2 += diff * diff / expected;
    }
  }
  return chi2;
}

// One score per column of `rows`.
inline std::vector<double> chi2_scores(const Matrix& rows, std::span<const std::size_t> labels,
                                       std::size_t bins = kChi2Bins) {
  std::vector<double> scores(static_cast<std::size_t>(rows.cols()));
  for (Eigen::Index j = 0; j < rows.cols(); ++j) scores[static_cast<std::size_t>(j)] = chi2_score(rows.col(j), labels, bins);
  return scores;
}

// Ascending indices of the `keep` highest scores; ties go to the lower index.
inline std::vector<std::size_t> chi2_select(std::span<const double> scores, std::size_t keep) {
  if (keep == 0) throw ArgumentError("chi2_select: keep must be >= 1");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(keep, scores.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace deepfeat
