#include "qtorus/densemat.hpp"

#include <algorithm>
#include <cmath>

namespace qtorus {

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* ar = row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += ar[c] * x[c];
    y[r] = s;
  }
  return y;
}

std::vector<double> Matrix::apply_transpose(const std::vector<double>& x) const {
  std::vector<double> y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* ar = row(r);
    const double xr = x[r];
    for (std::size_t c = 0; c < cols_; ++c) y[c] += ar[c] * xr;
  }
  return y;
}

DenseLU::DenseLU(Matrix a, bool parallel) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols())
    throw std::invalid_argument("DenseLU: matrix must be square");
  perm_.resize(lu_.rows());
  for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = i;
  factor(parallel);
}

void DenseLU::factor(bool parallel) {
  const std::size_t n = lu_.rows();
  for (std::size_t k = 0; k < n; ++k) {
    // pivot search stays serial; ties resolve to the lowest row
    std::size_t piv = k;
    double best = std::fabs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::fabs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0)
      throw SingularMatrixError("LU: exact zero pivot at column " + std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double* pivot_row = lu_.row(k);
    const double pivot = pivot_row[k];
    // each row below the pivot updates independently, so the parallel and
    // serial paths produce bitwise-identical factors
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (long long i = (long long)k + 1; i < (long long)n; ++i) {
        double* ri = lu_.row(std::size_t(i));
        const double l = ri[k] / pivot;
        ri[k] = l;
        for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * pivot_row[j];
      }
    } else {
      for (std::size_t i = k + 1; i < n; ++i) {
        double* ri = lu_.row(i);
        const double l = ri[k] / pivot;
        ri[k] = l;
        for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * pivot_row[j];
      }
    }
  }
}

double DenseLU::rcond_estimate() const {
  const std::size_t n = lu_.rows();
  double lo = std::fabs(lu_(0, 0)), hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    double d = std::fabs(lu_(i, i));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi == 0.0 ? 0.0 : lo / hi;
}

std::vector<double> DenseLU::solve(const std::vector<double>& b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw std::invalid_argument("DenseLU::solve: size mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const double* ri = lu_.row(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const double* ri = lu_.row(ii);
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= ri[j] * x[j];
    x[ii] = s / ri[ii];
  }
  return x;
}

std::vector<double> DenseLU::solve_transpose(const std::vector<double>& b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n)
    throw std::invalid_argument("DenseLU::solve_transpose: size mismatch");
  // A^T = U^T L^T P, so solve U^T y = b, L^T w = y, then undo the pivoting.
  std::vector<double> y(b);
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * y[j];
    y[i] = s / lu_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(j, ii) * y[j];
    y[ii] = s;
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
  return x;
}

Matrix DenseLU::inverse(bool parallel) const {
  const std::size_t n = lu_.rows();
  Matrix inv(n, n);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < (long long)n; ++c) {
      std::vector<double> e(n, 0.0);
      e[std::size_t(c)] = 1.0;
      std::vector<double> col = solve(e);
      for (std::size_t r = 0; r < n; ++r) inv(r, std::size_t(c)) = col[r];
    }
  } else {
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<double> e(n, 0.0);
      e[c] = 1.0;
      std::vector<double> col = solve(e);
      for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
  }
  return inv;
}

std::vector<double> singular_values_jacobi(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  // work on columns of a copy
  Matrix w = a;
  const double tol = 1e-15;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double* ri = w.row(i);
          app += ri[p] * ri[p];
          aqq += ri[q] * ri[q];
          apq += ri[p] * ri[q];
        }
        double denom = std::sqrt(app * aqq);
        if (denom == 0.0 || std::fabs(apq) <= tol * denom) continue;
        double zeta = (aqq - app) / (2.0 * apq);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          double* ri = w.row(i);
          double vp = ri[p], vq = ri[q];
          ri[p] = c * vp - s * vq;
          ri[q] = s * vp + c * vq;
        }
        rotated = true;
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w(i, c) * w(i, c);
    sv[c] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

double smallest_singular_value_power(const Matrix& a) {
  const std::size_t n = a.rows();
  DenseLU lu(a);
  std::vector<double> v(n, 1.0 / std::sqrt(double(n)));
  double rho_prev = 0.0;
  for (int it = 0; it < 1000; ++it) {
    std::vector<double> y = lu.solve_transpose(v);
    std::vector<double> w = lu.solve(y);
    double rho = 0.0, nw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rho += v[i] * w[i];
      nw += w[i] * w[i];
    }
    nw = std::sqrt(nw);
    if (nw == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (it > 3 && std::fabs(rho - rho_prev) <= 1e-12 * std::fabs(rho)) {
      rho_prev = rho;
      break;
    }
    rho_prev = rho;
  }
  return rho_prev <= 0.0 ? 0.0 : 1.0 / std::sqrt(rho_prev);
}

double smallest_singular_value(const Matrix& a, std::size_t jacobi_dim_cap) {
  if (a.rows() <= jacobi_dim_cap) {
    std::vector<double> sv = singular_values_jacobi(a);
    return sv.empty() ? 0.0 : sv.back();
  }
  try {
    return smallest_singular_value_power(a);
  } catch (const SingularMatrixError&) {
    return 0.0;
  }
}

}  // namespace qtorus
