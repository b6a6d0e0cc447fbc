#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/matrix.hpp"
#include "deepfeat/core/random.hpp"

namespace deepfeat {

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-4;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;
};

struct BinarySvmModel {
  Vector weights;
  double bias = 0.0;
  double c = 1.0;
  std::size_t epochs = 0;
  double final_violation = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // dual objective before training, then after each epoch

  [[nodiscard]] double decision(const Eigen::Ref<const Vector>& x) const { return weights.dot(x) + bias; }
};

// Linear soft-margin (hinge loss) SVM trained in the dual by randomized coordinate
// ascent. The bias is an extra constant-1 feature, so it is regularized with w and
// the dual has box constraints only:
//   max  sum(a) - 1/2 |sum_i a_i y_i [x_i, 1]|^2   s.t.  0 <= a_i <= C.
inline BinarySvmModel train_binary(const Matrix& rows, std::span<const int> labels, const SvmOptions& options) {
  const auto n = static_cast<std::size_t>(rows.rows());
  const auto d = rows.cols();
  if (n != labels.size()) throw ArgumentError("SVM rows and labels differ in length");
  if (n < 2) throw TrainingError("SVM needs at least 2 training rows");
  if (!(options.c > 0.0)) throw ArgumentError("SVM C must be positive");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw ArgumentError("SVM labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw TrainingError("SVM training set contains a single class");

  const double c = options.c;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> q_diag(n);
  for (std::size_t i = 0; i < n; ++i) q_diag[i] = rows.row(static_cast<Eigen::Index>(i)).squaredNorm() + 1.0;

  Vector w = Vector::Zero(d);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);

  BinarySvmModel model;
  model.c = c;
  model.objective_trace.push_back(0.0);
  for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double max_violation = 0.0;
    for (const std::size_t i : order) {
      const auto xi = rows.row(static_cast<Eigen::Index>(i));
      const double y = labels[i];
      const double grad = y * (xi.dot(w) + b) - 1.0;
      double projected = grad;
      if (alpha[i] <= 0.0) projected = std::min(grad, 0.0);
      else if (alpha[i] >= c) projected = std::max(grad, 0.0);
      max_violation = std::max(max_violation, std::abs(projected));
      if (projected == 0.0) continue;
      const double updated = std::clamp(alpha[i] - grad / q_diag[i], 0.0, c);
      const double delta = (updated - alpha[i]) * y;
      alpha[i] = updated;
      w.noalias() += delta * xi.transpose();
      b += delta;
    }
    const double objective = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * (w.squaredNorm() + b * b);
    model.objective_trace.push_back(objective);
    model.epochs = epoch + 1;
    model.final_violation = max_violation;
    if (max_violation < options.tol) {
      model.converged = true;
      break;
    }
  }
  model.weights = std::move(w);
  model.bias = b;
  return model;
}

}  // namespace deepfeat
