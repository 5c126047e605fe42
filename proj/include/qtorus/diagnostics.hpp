#pragma once

#include <cstdint>
#include <limits>
#include <map>

#include "qtorus/operator.hpp"

namespace qtorus {

/// Result of the Diophantine scan |<k,omega>| >= |k|^-tau over a finite box.
struct DiophantineResult {
  bool ok = true;
  MultiIndex worst_k;    // minimizer of |<k,omega>| * |k|^tau
  double margin = std::numeric_limits<double>::infinity();
};

/// Scans every k in Lambda_{2(M_box+1)} \ {0} with the l1 length |k|.
/// Fails iff some |<k,omega>| < |k|^-tau; margin is the scanned minimum of
/// |<k,omega>| * |k|^tau. OpenMP over the box.
DiophantineResult diophantine_check(const std::vector<double>& omega, int M_box,
                                    double tau);
/// Reference path kept for testing; identical result.
DiophantineResult diophantine_check_serial(const std::vector<double>& omega,
                                           int M_box, double tau);

/// Sampling box Omega for the Monte Carlo measure estimate. Degenerate
/// (lower == upper) components are allowed and sample the point mass.
struct FrequencyDomain {
  std::vector<double> lower, upper;
  std::size_t dim() const { return lower.size(); }
  void validate() const;
};

/// Fraction of `samples` frequencies drawn uniformly from the domain that
/// fail the Diophantine scan. Sampling is sharded deterministically from
/// (seed, shard); the result is bit-exact for a fixed seed regardless of
/// thread count.
double resonant_measure_mc(const FrequencyDomain& domain, int M_box, double tau,
                           std::size_t samples, std::uint64_t seed);
double resonant_measure_mc_serial(const FrequencyDomain& domain, int M_box,
                                  double tau, std::size_t samples,
                                  std::uint64_t seed);

/// sup_k ||zhat(k)||_2 exp(|k|^s) plus per-shell maxima (shell = l1 length).
struct GevreyProfile {
  double sup = 0.0;
  std::map<long, double> shell_max;
};
GevreyProfile gevrey_profile(const FourierVector& zhat, double s);

/// Worst |T^-1(row,col)| / (exp(-|k-k'|^s/2) + exp(-|k+k'|^s/2)) over pairs
/// with |k-k'| >= sqrt(N) and |k+k'| >= sqrt(N). 0 when no pair qualifies.
double localization_worst_ratio(const Matrix& inv, const ModeOrdering& order,
                                double s, int N);
double localization_worst_ratio_serial(const Matrix& inv, const ModeOrdering& order,
                                       double s, int N);

/// One iteration's condition diagnostics.
struct DiagnosticsReport {
  int iteration = -1;
  double log_inverse_norm = std::numeric_limits<double>::quiet_NaN();
  double log_epsilon_N = std::numeric_limits<double>::quiet_NaN();
  bool inversion_ok = false;
  bool localization_checked = false;  // false when skipped above the cap
  double localization_worst_ratio = std::numeric_limits<double>::quiet_NaN();
  double gevrey_sup = std::numeric_limits<double>::quiet_NaN();
  bool diophantine_ok = true;
  MultiIndex diophantine_worst_k;
  double diophantine_margin = std::numeric_limits<double>::infinity();
};

/// Inversion + localization checks of Condition 1 for an assembled operator.
/// The inversion comparison runs in log space: ok iff
/// log||T^-1|| <= (log N)^15. Localization materializes the dense inverse
/// and is skipped above localization_dim_cap rows. NearResonance propagates.
DiagnosticsReport condition_report(const TangentOperator& T, double s, int N,
                                   std::size_t localization_dim_cap = 2500);

}  // namespace qtorus
