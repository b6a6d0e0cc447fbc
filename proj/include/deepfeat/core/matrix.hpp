#pragma once

#include <Eigen/Dense>

namespace deepfeat {

// Row-major so that a sample is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace deepfeat
