#pragma once

#include <cmath>
#include <string>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/matrix.hpp"

namespace deepfeat {

// Per-feature z-scoring learned from training rows. Population standard deviation;
// zero-variance features keep a divisor of 1.
struct StandardizationStats {
  Vector mean;
  Vector stddev;

  static StandardizationStats fit(const Matrix& rows) {
    if (rows.rows() == 0) throw FitError("cannot standardize an empty matrix");
    StandardizationStats s;
    s.mean = rows.colwise().mean().transpose();
    s.stddev.resize(rows.cols());
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      const double var = (rows.col(j).array() - s.mean(j)).square().mean();
      const double sd = std::sqrt(var);
      s.stddev(j) = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  [[nodiscard]] Eigen::Index dim() const { return mean.size(); }

  [[nodiscard]] Matrix apply(const Matrix& rows) const {
    if (rows.cols() != dim())
      throw ArgumentError("standardization expects " + std::to_string(dim()) + " features, got " +
                          std::to_string(rows.cols()));
    return (rows.rowwise() - mean.transpose()).array().rowwise() / stddev.transpose().array();
  }
};

}  // namespace deepfeat
