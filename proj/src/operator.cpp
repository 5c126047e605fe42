#include "qtorus/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qtorus {

namespace {

// Flat lookup table for one scalar kernel over its support bounding box.
struct DenseKernel {
  std::vector<int> lo, hi;   // per-dimension bounds (inclusive)
  std::vector<double> data;  // row-major over the bounding box
  bool empty = true;

  void build(const LatticeFn& f, std::size_t n) {
    if (f.empty()) {
      empty = true;
      return;
    }
    empty = false;
    lo.assign(n, std::numeric_limits<int>::max());
    hi.assign(n, std::numeric_limits<int>::min());
    for (const auto& [k, v] : f) {
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], k[i]);
        hi[i] = std::max(hi[i], k[i]);
      }
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= std::size_t(hi[i] - lo[i] + 1);
    data.assign(total, 0.0);
    for (const auto& [k, v] : f) data[index(k)] = v;
  }

  std::size_t index(const MultiIndex& k) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < lo.size(); ++i)
      idx = idx * std::size_t(hi[i] - lo[i] + 1) + std::size_t(k[i] - lo[i]);
    return idx;
  }

  double get(const MultiIndex& k) const {
    if (empty) return 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (k[i] < lo[i] || k[i] > hi[i]) return 0.0;
    return data[index(k)];
  }

  // f(a - b) and f(a + b) without materializing the offset; the assembly
  // loop calls these once per matrix entry
  double get_diff(const MultiIndex& a, const MultiIndex& b) const {
    if (empty) return 0.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      int e = a[i] - b[i];
      if (e < lo[i] || e > hi[i]) return 0.0;
      idx = idx * std::size_t(hi[i] - lo[i] + 1) + std::size_t(e - lo[i]);
    }
    return data[idx];
  }
  double get_sum(const MultiIndex& a, const MultiIndex& b) const {
    if (empty) return 0.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      int e = a[i] + b[i];
      if (e < lo[i] || e > hi[i]) return 0.0;
      idx = idx * std::size_t(hi[i] - lo[i] + 1) + std::size_t(e - lo[i]);
    }
    return data[idx];
  }
};

struct DenseKernelTable {
  std::size_t n;
  std::vector<DenseKernel> toeplitz;  // [j*n + i]
  std::vector<DenseKernel> hankel;

  explicit DenseKernelTable(const HessianKernels& ker) : n(ker.n) {
    toeplitz.resize(n * n);
    hankel.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        toeplitz[j * n + i].build(ker.toeplitz[j][i], n);
        hankel[j * n + i].build(ker.hankel[j][i], n);
      }
    }
  }
};

void fill_s_row(const DenseKernelTable& table, const ModeOrdering& order,
                std::size_t r, double* out) {
  const ModeIndex& mr = order.mode(r);
  const std::size_t j = std::size_t(mr.j);
  for (std::size_t c = 0; c < order.rows(); ++c) {
    const ModeIndex& mc = order.mode(c);
    const std::size_t i = std::size_t(mc.j);
    out[c] = table.toeplitz[j * table.n + i].get_diff(mr.k, mc.k) +
             table.hankel[j * table.n + i].get_sum(mr.k, mc.k);
  }
}

}  // namespace

std::vector<double> assemble_D(const ModeOrdering& order,
                               const std::vector<double>& omega0,
                               const std::vector<double>& omega_drift) {
  const std::size_t n = order.box().n;
  if (omega0.size() != n || omega_drift.size() != n)
    throw std::invalid_argument("assemble_D: frequency length does not match box dimension");
  std::vector<double> d(order.rows());
  for (std::size_t r = 0; r < order.rows(); ++r) {
    const ModeIndex& m = order.mode(r);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += double(m.k[i]) * omega_drift[i];
    d[r] = -dot + omega0[std::size_t(m.j)];
  }
  return d;
}

Matrix assemble_S(const HessianKernels& kernels, const ModeOrdering& order) {
  DenseKernelTable table(kernels);
  Matrix s(order.rows(), order.rows());
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < (long long)order.rows(); ++r)
    fill_s_row(table, order, std::size_t(r), s.row(std::size_t(r)));
  return s;
}

Matrix assemble_S_serial(const HessianKernels& kernels, const ModeOrdering& order) {
  DenseKernelTable table(kernels);
  Matrix s(order.rows(), order.rows());
  for (std::size_t r = 0; r < order.rows(); ++r)
    fill_s_row(table, order, r, s.row(r));
  return s;
}

RankFactors assemble_B(const std::vector<std::vector<double>>& qgrad,
                       const std::vector<double>& zp_rows,
                       const ModeOrdering& order, BScaleMode mode,
                       double amplitude) {
  const std::size_t n = order.box().n;
  const std::size_t rows = order.rows();
  if (qgrad.size() != n || zp_rows.size() != rows)
    throw std::invalid_argument("assemble_B: shape mismatch");
  const double c = mode == BScaleMode::kChainRule ? 1.0 / amplitude
                                                  : 1.0 / std::exp(1.0);
  RankFactors f{Matrix(rows, n), Matrix(n, rows)};
  for (std::size_t r = 0; r < rows; ++r) {
    const ModeIndex& m = order.mode(r);
    for (std::size_t i = 0; i < n; ++i)
      f.u(r, i) = -c * zp_rows[r] * double(m.k[i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t colIdx = 0; colIdx < rows; ++colIdx)
      f.w(i, colIdx) = qgrad[i][colIdx];
  return f;
}

TangentOperator assemble_T(const PolynomialHamiltonian& H,
                           const FourierVector& zhat,
                           const std::vector<double>& omega0,
                           const std::vector<double>& omega_drift,
                           const LatticeBox& box, double epsilon,
                           const OperatorConfig& config) {
  TangentOperator T;
  T.order = std::make_shared<ModeOrdering>(box, config.mode_budget);
  T.D = assemble_D(*T.order, omega0, omega_drift);
  HessianKernels ker = hessian_kernels(H, zhat, config.mode_budget);
  T.S = assemble_S(ker, *T.order);
  T.epsilon = epsilon;
  T.omega0 = omega0;
  T.omega_drift = omega_drift;
  T.rcond_floor = config.rcond_floor;
  if (config.use_B) {
    std::vector<double> zp_rows(T.order->rows());
    for (std::size_t r = 0; r < T.order->rows(); ++r)
      zp_rows[r] = zhat.get(T.order->mode(r));
    RankFactors f = assemble_B(q_gradient(H, zhat, *T.order), zp_rows, *T.order,
                               config.b_scale, config.amplitude);
    T.Bu = std::move(f.u);
    T.Bw = std::move(f.w);
  } else {
    T.Bu = Matrix(T.order->rows(), 0);
    T.Bw = Matrix(0, T.order->rows());
  }
  return T;
}

Matrix materialize(const TangentOperator& T) {
  const std::size_t rows = T.rows();
  const std::size_t nb = T.Bu.cols();
  Matrix m(rows, rows);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < (long long)rows; ++r) {
    const std::size_t rr = std::size_t(r);
    double* out = m.row(rr);
    const double* srow = T.S.row(rr);
    for (std::size_t c = 0; c < rows; ++c) {
      double b = 0.0;
      for (std::size_t i = 0; i < nb; ++i) b += T.Bu(rr, i) * T.Bw(i, c);
      out[c] = T.epsilon * (srow[c] + b);
    }
    out[rr] += T.D[rr];
  }
  return m;
}

namespace {

NearResonanceError near_resonance(const TangentOperator& T, const std::string& reason) {
  std::size_t worst = 0;
  for (std::size_t r = 1; r < T.rows(); ++r)
    if (std::fabs(T.D[r]) < std::fabs(T.D[worst])) worst = r;
  const ModeIndex& m = T.order->mode(worst);
  return NearResonanceError(
      reason + "; smallest divisor " + std::to_string(T.D[worst]) + " at (j=" +
          std::to_string(m.j + 1) + ", k=" + m.k.str() + ")",
      m, T.D[worst]);
}

}  // namespace

OperatorSolver::OperatorSolver(const TangentOperator& T) : mat_(materialize(T)) {
  try {
    lu_ = std::make_unique<DenseLU>(mat_);
  } catch (const SingularMatrixError& e) {
    throw near_resonance(T, std::string("singular tangent operator: ") + e.what());
  }
  rcond_ = lu_->rcond_estimate();
  if (rcond_ < T.rcond_floor)
    throw near_resonance(T, "tangent operator condition estimate " +
                                std::to_string(rcond_) + " below floor");
}

std::vector<double> OperatorSolver::solve(const std::vector<double>& rhs) const {
  return lu_->solve(rhs);
}

double OperatorSolver::log_inverse_norm() const {
  const std::size_t n = mat_.rows();
  if (n <= 600) {
    std::vector<double> sv = singular_values_jacobi(mat_);
    double smin = sv.empty() ? 0.0 : sv.back();
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : -std::log(smin);
  }
  std::vector<double> v(n, 1.0 / std::sqrt(double(n)));
  double rho = 0.0;
  for (int it = 0; it < 400; ++it) {
    std::vector<double> y = lu_->solve_transpose(v);
    std::vector<double> w = lu_->solve(y);
    double r = 0.0, nw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r += v[i] * w[i];
      nw += w[i] * w[i];
    }
    nw = std::sqrt(nw);
    if (nw == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    bool done = it > 3 && std::fabs(r - rho) <= 1e-10 * std::fabs(r);
    rho = r;
    if (done) break;
  }
  return rho <= 0.0 ? std::numeric_limits<double>::infinity() : 0.5 * std::log(rho);
}

std::vector<double> solve_linear(const TangentOperator& T,
                                 const std::vector<double>& rhs) {
  if (rhs.size() != T.rows())
    throw std::invalid_argument("solve_linear: rhs length does not match operator rows");
  OperatorSolver solver(T);
  return solver.solve(rhs);
}

double inverse_norm(const TangentOperator& T) {
  Matrix m = materialize(T);
  double smin = smallest_singular_value(m);
  if (smin == 0.0)
    throw near_resonance(T, "tangent operator has zero singular value");
  return 1.0 / smin;
}

double log_epsilon_threshold(int N) {
  if (N < 2) throw std::invalid_argument("log_epsilon_threshold: N must be >= 2");
  return -std::pow(std::log(double(N)), 15.0);
}

}  // namespace qtorus
