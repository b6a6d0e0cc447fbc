#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/matrix.hpp"

namespace deepfeat {

struct PcaModel {
  Vector mean;                  // d
  Matrix components;            // k x d, orthonormal rows, descending variance
  Vector explained_variance;    // k, sample variance along each component

  [[nodiscard]] std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  [[nodiscard]] std::size_t kept() const { return static_cast<std::size_t>(components.rows()); }
};

// Keeps k = min(keep, d, n - 1) components. Each component is signed so that its
// largest-magnitude entry (first one on ties) is positive.
inline PcaModel pca_fit(const Matrix& train_rows, std::size_t keep) {
  const auto n = static_cast<std::size_t>(train_rows.rows());
  const auto d = static_cast<std::size_t>(train_rows.cols());
  if (n < 2) throw FitError("PCA needs at least 2 training rows, got " + std::to_string(n));
  if (d == 0) throw FitError("PCA needs at least one feature");
  if (keep == 0) throw ArgumentError("PCA keep must be >= 1");
  const std::size_t k = std::min({keep, d, n - 1});

  PcaModel model;
  model.mean = train_rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = train_rows.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::MatrixXd& v = svd.matrixV();

  model.components.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  model.explained_variance.resize(static_cast<Eigen::Index>(k));
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(k); ++c) {
    Vector dir = v.col(c);
    Eigen::Index arg = 0;
    dir.cwiseAbs().maxCoeff(&arg);
    if (dir(arg) < 0) dir = -dir;
    model.components.row(c) = dir.transpose();
    const double s = svd.singularValues()(c);
    model.explained_variance(c) = s * s / static_cast<double>(n - 1);
  }
  return model;
}

inline std::vector<double> pca_project(const PcaModel& model, std::span<const double> row) {
  if (row.size() != model.input_dim())
    throw ArgumentError("PCA expects rows of length " + std::to_string(model.input_dim()) + ", got " +
                        std::to_string(row.size()));
  const Eigen::Map<const Vector> x(row.data(), static_cast<Eigen::Index>(row.size()));
  const Vector projected = model.components * (x - model.mean);
  return {projected.data(), projected.data() + projected.size()};
}

inline Matrix pca_project(const PcaModel& model, const Matrix& rows) {
  if (static_cast<std::size_t>(rows.cols()) != model.input_dim())
    throw ArgumentError("PCA expects rows of length " + std::to_string(model.input_dim()) + ", got " +
                        std::to_string(rows.cols()));
  return (rows.rowwise() - model.mean.transpose()) * model.components.transpose();
}

}  // namespace deepfeat
