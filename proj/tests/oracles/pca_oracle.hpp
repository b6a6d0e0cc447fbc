#pragma once

// Principal axes from a cyclic Jacobi eigendecomposition of the sample covariance
// matrix, written without any linear-algebra library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

struct EigenPairs {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
};

inline EigenPairs jacobi_eigen(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  EigenPairs out;
  for (auto k : order) {
    out.values.push_back(a[k][k]);
    std::vector<double> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v[i][k];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

// rows: n samples of dimension d. Covariance uses the n - 1 denominator.
inline EigenPairs covariance_eigen(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size(), d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / static_cast<double>(n - 1);
  return jacobi_eigen(cov);
}

}  // namespace oracle
