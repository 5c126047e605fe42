#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qtorus {

/// Row-major dense real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
  double* row(std::size_t r) { return a_.data() + r * cols_; }
  const double* row(std::size_t r) const { return a_.data() + r * cols_; }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<double> apply_transpose(const std::vector<double>& x) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Raised when a factorization meets a (near-)singular pivot or the
/// reciprocal condition estimate drops below the configured floor.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what)
      : std::runtime_error(what) {}
};

/// LU factorization with partial (row) pivoting. The trailing update is the
/// OpenMP kernel; factor_serial is the reference path kept for testing and
/// produces bitwise-identical factors.
class DenseLU {
 public:
  explicit DenseLU(Matrix a, bool parallel = true);

  std::size_t dim() const { return lu_.rows(); }
  /// min |U_ii| / max |U_ii|; cheap reciprocal-condition proxy.
  double rcond_estimate() const;

  std::vector<double> solve(const std::vector<double>& b) const;
  /// Solves A^T x = b against the same factorization.
  std::vector<double> solve_transpose(const std::vector<double>& b) const;
  /// Dense inverse, columns solved independently (OpenMP when enabled).
  Matrix inverse(bool parallel = true) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  void factor(bool parallel);
};

/// All singular values, descending, by one-sided Jacobi. Exact and
/// deterministic; intended for small and mid-size matrices.
std::vector<double> singular_values_jacobi(const Matrix& a);

/// Smallest singular value. Uses the Jacobi path up to jacobi_dim_cap rows,
/// otherwise inverse power iteration on A^T A via an LU of A.
double smallest_singular_value(const Matrix& a, std::size_t jacobi_dim_cap = 600);

/// Power-iteration bound used above the Jacobi cap; exposed for tests.
double smallest_singular_value_power(const Matrix& a);

}  // namespace qtorus
