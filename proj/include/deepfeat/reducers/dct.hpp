#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "deepfeat/core/error.hpp"
#include "deepfeat/tensor/activation_tensor.hpp"

namespace deepfeat {

// (row, col) positions of an rows x cols block in JPEG zigzag order: anti-diagonals
// from the DC term outward, odd diagonals walked downward, even ones upward.
inline std::vector<std::pair<std::size_t, std::size_t>> zigzag_order(std::size_t rows, std::size_t cols) {
  std::vector<std::pair<std::size_t, std::size_t>> order;
  order.reserve(rows * cols);
  for (std::size_t s = 0; s + 1 < rows + cols; ++s) {
    const std::size_t i_lo = s >= cols ? s - cols + 1 : 0;
    const std::size_t i_hi = std::min(s, rows - 1);
    if (s % 2 == 1) {
      for (std::size_t i = i_lo; i <= i_hi; ++i) order.emplace_back(i, s - i);
    } else {
      for (std::size_t i = i_hi + 1; i-- > i_lo;) order.emplace_back(i, s - i);
    }
  }
  return order;
}

// Orthonormal DCT-II basis, basis[k * n + j] = a_k cos(pi (2j + 1) k / 2n).
inline std::vector<double> dct_basis(std::size_t n) {
  std::vector<double> basis(n * n);
  const double a0 = std::sqrt(1.0 / static_cast<double>(n));
  const double ak = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      basis[k * n + j] = (k == 0 ? a0 : ak) * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) /
                                                         (2.0 * static_cast<double>(n)));
  return basis;
}

// Separable 2-D DCT-II for one map size; build once, reuse across channels and samples.
class Dct2d {
 public:
  Dct2d(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), row_basis_(dct_basis(rows)), col_basis_(dct_basis(cols)),
        zigzag_(zigzag_order(rows, cols)) {
    if (rows == 0 || cols == 0) throw ArgumentError("DCT map must be at least 1x1");
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  // First `keep` coefficients in zigzag order.
  template <typename T>
  [[nodiscard]] std::vector<double> forward(ChannelMap<T> map, std::size_t keep) const {
    if (map.rows != rows_ || map.cols != cols_)
      throw ArgumentError("DCT plan is " + std::to_string(rows_) + "x" + std::to_string(cols_) + ", map is " +
                          std::to_string(map.rows) + "x" + std::to_string(map.cols));
    if (keep > rows_ * cols_)
      throw ArgumentError("keep " + std::to_string(keep) + " exceeds map size " + std::to_string(rows_ * cols_));
    // tmp = B_rows * X
    std::vector<double> tmp(rows_ * cols_, 0.0);
    for (std::size_t u = 0; u < rows_; ++u)
      for (std::size_t i = 0; i < rows_; ++i) {
        const double b = row_basis_[u * rows_ + i];
        for (std::size_t j = 0; j < cols_; ++j) tmp[u * cols_ + j] += b * static_cast<double>(map(i, j));
      }
    std::vector<double> out(keep);
    for (std::size_t idx = 0; idx < keep; ++idx) {
      const auto [u, v] = zigzag_[idx];
      double acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += tmp[u * cols_ + j] * col_basis_[v * cols_ + j];
      out[idx] = acc;
    }
    return out;
  }

  // Reconstructs the row-major map from zigzag coefficients; missing ones count as zero.
  [[nodiscard]] std::vector<double> inverse(std::span<const double> coefficients) const {
    if (coefficients.size() > rows_ * cols_) throw ArgumentError("too many DCT coefficients");
    std::vector<double> coef(rows_ * cols_, 0.0);
    for (std::size_t idx = 0; idx < coefficients.size(); ++idx) {
      const auto [u, v] = zigzag_[idx];
      coef[u * cols_ + v] = coefficients[idx];
    }
    // tmp = C * B_cols, out = B_rows^T * tmp
    std::vector<double> tmp(rows_ * cols_, 0.0);
    for (std::size_t u = 0; u < rows_; ++u)
      for (std::size_t v = 0; v < cols_; ++v) {
        const double c = coef[u * cols_ + v];
        if (c == 0.0) continue;
        for (std::size_t j = 0; j < cols_; ++j) tmp[u * cols_ + j] += c * col_basis_[v * cols_ + j];
      }
    std::vector<double> out(rows_ * cols_, 0.0);
    for (std::size_t u = 0; u < rows_; ++u)
      for (std::size_t i = 0; i < rows_; ++i) {
        const double b = row_basis_[u * rows_ + i];
        for (std::size_t j = 0; j < cols_; ++j) out[i * cols_ + j] += b * tmp[u * cols_ + j];
      }
    return out;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> row_basis_;
  std::vector<double> col_basis_;
  std::vector<std::pair<std::size_t, std::size_t>> zigzag_;
};

template <typename T>
std::vector<double> dct_channel(ChannelMap<T> map, std::size_t keep) {
  if (keep > map.size())
    throw ArgumentError("keep " + std::to_string(keep) + " exceeds map size " + std::to_string(map.size()));
  return Dct2d(map.rows, map.cols).forward(map, keep);
}

namespace detail {

// FFTW's planner is not thread-safe; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(static_cast<double*>(fftw_malloc(sizeof(double) * n))) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* ptr;
};

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* plan) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

inline FftwPlan make_r2r_plan(std::size_t n, fftw_r2r_kind kind) {
  FftwBuffer in(n), out(n);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(n), in.ptr, out.ptr, kind, FFTW_ESTIMATE);
  if (!plan) throw Error("FFTW could not plan a transform of length " + std::to_string(n));
  return FftwPlan(plan);
}

}  // namespace detail

// Orthonormal 1-D DCT-II of a fixed length, computed through FFTW (REDFT10/REDFT01).
// forward/inverse are safe to call concurrently on one instance.
class Dct1d {
 public:
  explicit Dct1d(std::size_t length)
      : length_(checked_length(length)),
        forward_plan_(detail::make_r2r_plan(length, FFTW_REDFT10)),
        inverse_plan_(detail::make_r2r_plan(length, FFTW_REDFT01)) {}

  [[nodiscard]] std::size_t length() const { return length_; }

  template <typename T>
  [[nodiscard]] std::vector<double> forward(std::span<const T> signal, std::size_t keep) const {
    if (signal.size() != length_)
      throw ArgumentError("DCT plan length " + std::to_string(length_) + ", signal length " +
                          std::to_string(signal.size()));
    if (keep > length_)
      throw ArgumentError("keep " + std::to_string(keep) + " exceeds signal length " + std::to_string(length_));
    detail::FftwBuffer in(length_), out(length_);
    for (std::size_t i = 0; i < length_; ++i) in.ptr[i] = static_cast<double>(signal[i]);
    fftw_execute_r2r(forward_plan_.get(), in.ptr, out.ptr);
    // REDFT10 yields 2 * sum x_n cos(...), unscaled.
    std::vector<double> coef(keep);
    for (std::size_t k = 0; k < keep; ++k) coef[k] = 0.5 * scale(k) * out.ptr[k];
    return coef;
  }

  // Missing trailing coefficients count as zero.
  [[nodiscard]] std::vector<double> inverse(std::span<const double> coefficients) const {
    if (coefficients.size() > length_) throw ArgumentError("too many DCT coefficients");
    detail::FftwBuffer in(length_), out(length_);
    for (std::size_t k = 0; k < length_; ++k) {
      const double c = k < coefficients.size() ? coefficients[k] : 0.0;
      // REDFT01 computes X_0 + 2 sum_{k>0} X_k cos(...).
      in.ptr[k] = k == 0 ? scale(0) * c : 0.5 * scale(k) * c;
    }
    fftw_execute_r2r(inverse_plan_.get(), in.ptr, out.ptr);
    return {out.ptr, out.ptr + length_};
  }

 private:
  static std::size_t checked_length(std::size_t n) {
    if (n == 0) throw ArgumentError("DCT length must be >= 1");
    if (n > static_cast<std::size_t>(std::numeric_limits<int>::max())) throw ArgumentError("DCT length too large");
    return n;
  }
  [[nodiscard]] double scale(std::size_t k) const {
    return std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(length_));
  }

  std::size_t length_;
  detail::FftwPlan forward_plan_;
  detail::FftwPlan inverse_plan_;
};

template <typename T>
std::vector<double> dct_global(std::span<const T> vector, std::size_t keep = 1000) {
  if (keep > vector.size())
    throw ArgumentError("keep " + std::to_string(keep) + " exceeds vector length " + std::to_string(vector.size()));
  return Dct1d(vector.size()).forward(vector, keep);
}

}  // namespace deepfeat
