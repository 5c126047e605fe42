#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "qtorus/diagnostics.hpp"
#include "qtorus/operator.hpp"

namespace qtorus {

struct SolverConfig {
  int M = 2;                    // box growth factor per iteration
  int N0 = 1;                   // initial half-width
  int max_iter = 8;             // Newton steps
  double tol_residual = 1e-12;  // l2 stop on ||F||
  bool use_B = true;
  BScaleMode b_scale = BScaleMode::kChainRule;
  double amplitude = 0.36787944117144233;  // a_j = e^-1
  double tau = 2.0;                        // Diophantine exponent
  bool strict_conditions = false;
  std::uint64_t seed = 0;
  int N_cap = 64;  // box cap; at the cap the iteration continues fixed-truncation
  // cap on the dense Newton dimension n(2N+1)^n - n; box growth clamps to
  // the largest box that fits, which matters for n >= 2 where N_cap alone
  // would allow multi-gigabyte operators
  std::size_t dense_rows_cap = 6000;
  double rcond_floor = 1e-14;
  std::size_t mode_budget = kDefaultModeBudget;
  // diagnostics knobs carried along with the run
  double gevrey_s = 0.5;
  int diophantine_box = 10;
  std::size_t localization_dim_cap = 2500;

  void validate() const;
  OperatorConfig operator_config() const {
    return OperatorConfig{use_B, b_scale, amplitude, rcond_floor, mode_budget};
  }
};

enum class Termination { kConverged, kMaxIter, kNearResonance, kConditionViolation };

std::string to_string(Termination t);

/// One iterate of the alternating procedure. Row r pairs omega^(r) with
/// zhat^(r); residual_l2 is ||F(zhat^(r), omega^(r+1))||, the right-hand
/// side that drives the step out of this iterate.
struct IterationRecord {
  int r = 0;
  int N = 0;  // support box half-width of this iterate
  std::vector<double> omega;
  double residual_l2 = 0.0;
  double step_l2 = 0.0;  // ||Delta|| taken INTO this iterate (0 at r=0)
  std::size_t support_size = 0;
  double log_inverse_norm = std::numeric_limits<double>::quiet_NaN();
  double gevrey_sup = 0.0;
  bool diophantine_ok = true;
  double diophantine_margin = std::numeric_limits<double>::infinity();
  MultiIndex diophantine_worst_k;
  std::vector<double> omega_next;  // omega^(r+1), the Q-update off this iterate
  FourierVector zhat;              // full iterate (pinned + non-resonant)
};

struct SolverState {
  SolverConfig config;
  std::vector<IterationRecord> history;
  Termination termination = Termination::kMaxIter;
  std::string termination_detail;
  std::vector<double> omega_final;  // frequency consistent with zhat_final
  FourierVector zhat_final;
  double final_residual = 0.0;
  double theoretical_M = 0.0;  // exp((log 1/eps)^(1/20)), logged for reference
  bool box_capped = false;
};

/// Full zhat: the pinned resonant amplitudes a at (j, e_j) plus zhat_p.
FourierVector with_resonant_amplitudes(const FourierVector& zhat_p, std::size_t n,
                                       double amplitude);

/// Frequency update solving the Q-equations exactly:
/// omega'_j = omega_j + eps * Xq_j / a.
std::vector<double> q_update(const PolynomialHamiltonian& H,
                             const FourierVector& zhat_p, double amplitude,
                             double epsilon);

/// Full non-resonant residual
///   F(j,k) = (-<k,omega'> + omega_j) zp(j,k) + eps * Xp(j,k)
/// over the algebraic support (the box enlarged by the polynomial degree);
/// resonant pairs are excluded. `box` must contain supp zhat_p.
FourierVector residual_F(const PolynomialHamiltonian& H,
                         const FourierVector& zhat_p,
                         const std::vector<double>& omega0,
                         const std::vector<double>& omega_drift, double epsilon,
                         const LatticeBox& box, double amplitude,
                         std::size_t budget = kDefaultModeBudget);

struct PStepResult {
  FourierVector zhat_p;  // new iterate, supported in Lambda_{N_next}
  int N_next = 0;
  bool capped = false;  // box growth limited by N_cap or dense_rows_cap
  double step_l2 = 0.0;
  double log_inverse_norm = std::numeric_limits<double>::quiet_NaN();
};

/// Dimension-enlarged Newton step: grows the box to min(M*N_r, N_cap),
/// assembles (T + eps B) there at (zhat_p, omega_next), solves against the
/// projected residual and subtracts. Throws NearResonanceError.
PStepResult p_update(const PolynomialHamiltonian& H, const FourierVector& zhat_p,
                     const std::vector<double>& omega_next,
                     const FourierVector& F, int N_r, const SolverConfig& config);

/// The alternating procedure: frequency update, then dimension-enlarged
/// Newton step, until ||F|| <= tol or max_iter. A NearResonance abort
/// preserves the partial history in the returned state.
SolverState run(const PolynomialHamiltonian& H, const SolverConfig& config);

/// Time-domain evaluation of an iterate along the drifted frequency ray.
struct Evaluation {
  std::vector<std::complex<double>> z;
  std::vector<double> x;  // x_j = -sqrt(2) Im z_j
  std::vector<double> y;  // y_j =  sqrt(2) Re z_j
};
Evaluation evaluate_solution(const FourierVector& zhat,
                             const std::vector<double>& omega_drift, double t);

}  // namespace qtorus
