#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gammastein {

/// Small dense row-major matrix. Sized for the d <= ~12 covariance matrices
/// used by the multivariate gamma projections.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// From row-major nested rows; throws std::domain_error on ragged input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::vector<std::vector<double>> to_rows() const;

  /// Symmetric to within rel_tol relative to the largest entry magnitude.
  bool is_symmetric(double rel_tol = 1e-10) const;
  bool is_diagonal() const;

  /// Principal submatrix on the indices whose bits are set in mask.
  Matrix principal_submatrix(unsigned mask) const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Determinant by LU with partial pivoting. det of a 0x0 matrix is 1.
double determinant(Matrix m);

/// Lower Cholesky factor, or nullopt if m is not positive definite.
std::optional<Matrix> cholesky(const Matrix& m);

double trace(const Matrix& m);

}  // namespace gammastein
