#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smilerisk {

/// Dense row-major matrix of doubles. Small sizes only (kernels on sample
/// grids, Galerkin systems), so no blocking or expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::vector<double> col(std::size_t j) const;

  std::span<const double> data() const { return data_; }

  Matrix transposed() const;
  double frobenius_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Lower-triangular L with L·Lᵀ = a. Throws Error(CholeskyFailure) when a
/// non-positive pivot shows up.
Matrix cholesky(const Matrix& a);

/// Solves L·x = b for lower-triangular L.
std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> b);
/// Solves Lᵀ·x = b for lower-triangular L.
std::vector<double> back_substitute_transposed(const Matrix& lower,
                                               std::span<const double> b);

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]; unit norm
  int sweeps = 0;
};

/// Cyclic Jacobi for a symmetric matrix. Sweeps in fixed row-major pair
/// order until the off-diagonal Frobenius norm is ≤ rel_tol·‖a‖_F.
/// Throws Error(NoConvergence) after max_sweeps.
SymmetricEigen jacobi_eigen(const Matrix& a, double rel_tol = 1e-12,
                            int max_sweeps = 100);

}  // namespace smilerisk
