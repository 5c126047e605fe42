#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "qtorus/densemat.hpp"
#include "qtorus/hamiltonian.hpp"
#include "qtorus/lattice.hpp"

namespace qtorus {

/// Signals a "bad" frequency: the restricted operator is (numerically)
/// singular. Frequency exclusion is the caller's remedy; this is never
/// retried internally.
class NearResonanceError : public std::runtime_error {
 public:
  NearResonanceError(const std::string& what, ModeIndex worst, double value)
      : std::runtime_error(what), worst_mode(std::move(worst)), divisor(value) {}
  ModeIndex worst_mode;  // smallest small-divisor entry when known
  double divisor = 0.0;
};

/// Prefactor convention for the rank-structured frequency coupling B.
/// kChainRule uses 1/a (the value the finite-difference Jacobian validates);
/// kFixedInverseE pins the constant 1/e instead, kept for comparison runs.
enum class BScaleMode { kChainRule, kFixedInverseE };

struct OperatorConfig {
  bool use_B = true;
  BScaleMode b_scale = BScaleMode::kChainRule;
  double amplitude = std::exp(-1.0);
  double rcond_floor = 1e-14;
  std::size_t mode_budget = kDefaultModeBudget;
};

/// Restricted tangent operator (T + eps B)_N = D + eps S + eps B on the
/// non-resonant modes of a box. Immutable after assembly.
struct TangentOperator {
  std::shared_ptr<const ModeOrdering> order;
  std::vector<double> D;  // diagonal, entry row(j,k) = -<k,omega'> + omega_j
  Matrix S;               // Toeplitz + Hankel perturbation Hessian
  Matrix Bu;              // rows x n factor of B (zero-width when B disabled)
  Matrix Bw;              // n x rows factor of B
  double epsilon = 0.0;
  std::vector<double> omega0;
  std::vector<double> omega_drift;
  double rcond_floor = 1e-14;

  std::size_t rows() const { return D.size(); }
  const LatticeBox& box() const { return order->box(); }
};

std::vector<double> assemble_D(const ModeOrdering& order,
                               const std::vector<double>& omega0,
                               const std::vector<double>& omega_drift);

/// Dense S from the Hessian kernels: S(row(j,k), col(i,k')) =
/// toeplitz[j][i](k-k') + hankel[j][i](k+k'). OpenMP over rows.
Matrix assemble_S(const HessianKernels& kernels, const ModeOrdering& order);
/// Reference path, kept for testing; bitwise-identical output.
Matrix assemble_S_serial(const HessianKernels& kernels, const ModeOrdering& order);

/// Factors of B with materialized entry
///   B(row(j,k), col) = -c * zp(row) * sum_m k_m * qgrad[m][col],
/// i.e. Bu * Bw with Bu(row, m) = -c * zp(row) * k_m and Bw(m, col) =
/// qgrad[m][col]. Rank is at most n (exactly rank <= 1 when n == 1).
struct RankFactors {
  Matrix u;  // rows x n
  Matrix w;  // n x rows
};
RankFactors assemble_B(const std::vector<std::vector<double>>& qgrad,
                       const std::vector<double>& zp_rows,
                       const ModeOrdering& order, BScaleMode mode,
                       double amplitude);

/// Full assembly at state zhat (resonant amplitudes included) and drifted
/// frequency omega_drift.
TangentOperator assemble_T(const PolynomialHamiltonian& H,
                           const FourierVector& zhat,
                           const std::vector<double>& omega0,
                           const std::vector<double>& omega_drift,
                           const LatticeBox& box, double epsilon,
                           const OperatorConfig& config);

/// Dense T_mat = diag(D) + eps*S + eps*Bu*Bw.
Matrix materialize(const TangentOperator& T);

/// Factored operator: one LU serves the Newton solve and the diagnostics.
class OperatorSolver {
 public:
  /// Throws NearResonanceError when the factorization hits a singular pivot
  /// or the reciprocal-condition estimate falls below T.rcond_floor.
  explicit OperatorSolver(const TangentOperator& T);

  std::vector<double> solve(const std::vector<double>& rhs) const;
  double rcond() const { return rcond_; }
  /// log ||T^-1||_2 estimated by inverse power iteration on the factors.
  double log_inverse_norm() const;
  const Matrix& matrix() const { return mat_; }
  const DenseLU& lu() const { return *lu_; }

 private:
  Matrix mat_;
  std::unique_ptr<DenseLU> lu_;
  double rcond_ = 0.0;
};

/// Solves T_mat x = rhs by row-pivoted dense factorization.
std::vector<double> solve_linear(const TangentOperator& T,
                                 const std::vector<double>& rhs);

/// ||T_mat^-1||_2 = 1/sigma_min. Throws NearResonanceError when singular.
double inverse_norm(const TangentOperator& T);

/// log eps_N = -(log N)^15, the Condition-1 threshold kept in log space
/// (the literal eps_N underflows for N >= 3).
double log_epsilon_threshold(int N);

}  // namespace qtorus
