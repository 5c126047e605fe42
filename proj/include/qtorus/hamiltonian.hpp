#pragma once

#include <complex>
#include <map>
#include <vector>

#include "qtorus/lattice.hpp"

namespace qtorus {

/// Scalar lattice function k -> real value, finitely supported.
using LatticeFn = std::map<MultiIndex, double>;

/// One perturbation term h * (z^alpha zbar^beta + z^beta zbar^alpha).
/// The symmetric partner is implicit; when alpha == beta the term is
/// h * z^alpha zbar^alpha exactly once.
struct Monomial {
  double coeff = 0.0;
  MultiIndex alpha;  // z exponents, entries >= 0
  MultiIndex beta;   // zbar exponents, entries >= 0

  long degree() const { return alpha.norm_l1() + beta.norm_l1(); }
};

/// H = sum_j omega_j |z_j|^2 + epsilon * H1 with H1 a real polynomial.
/// The unperturbed part is isochronous: constant frequencies omega0.
struct PolynomialHamiltonian {
  std::size_t n = 1;
  std::vector<double> omega0;
  std::vector<Monomial> terms;
  double epsilon = 0.0;

  /// Max total degree over the perturbation terms (0 when empty).
  long max_degree() const {
    long d = 0;
    for (const auto& t : terms) d = std::max(d, t.degree());
    return d;
  }
  /// Checks dimensions, degree >= 3, finite entries. Throws invalid_argument.
  void validate() const;
};

/// Fourier kernels of the second derivatives of H1 at a state zhat:
///   toeplitz[j][i](m) = coefficient m of d^2 H1 / dz_i dzbar_j
///   hankel[j][i](m)   = coefficient m of d^2 H1 / dzbar_i dzbar_j
struct HessianKernels {
  std::size_t n = 0;
  std::vector<std::vector<LatticeFn>> toeplitz;  // [j][i]
  std::vector<std::vector<LatticeFn>> hankel;    // [j][i]
};

/// Convolution (u*v)(k) = sum_{k'} u(k-k') v(k'). Direct double loop over
/// the supports in canonical order; entries touched by the accumulation are
/// kept even when they cancel.
LatticeFn convolve(const LatticeFn& u, const LatticeFn& v,
                   std::size_t budget = kDefaultModeBudget);

double lattice_get(const LatticeFn& f, const MultiIndex& k);

/// Xhat = lattice transcription of dH1/dzbar at zhat, with every z_i read
/// from zhat and every zbar_i from flip(zhat). epsilon is NOT applied.
FourierVector vector_field(const PolynomialHamiltonian& H,
                           const FourierVector& zhat,
                           std::size_t budget = kDefaultModeBudget);

/// Resonant components (X_1(e_1), ..., X_n(e_n)).
std::vector<double> resonant_field(const FourierVector& X);

/// Second-derivative kernels at zhat, by symbolic differentiation of every
/// directed term followed by convolution evaluation.
HessianKernels hessian_kernels(const PolynomialHamiltonian& H,
                               const FourierVector& zhat,
                               std::size_t budget = kDefaultModeBudget);

/// d Xq_m / d zp(i,k') assembled from the kernels:
///   entry(m, col(i,k')) = toeplitz[m][i](e_m - k') + hankel[m][i](e_m + k').
/// Columns follow the mode ordering of the box. Row-major n x rows.
std::vector<std::vector<double>> q_gradient(const PolynomialHamiltonian& H,
                                            const FourierVector& zhat,
                                            const ModeOrdering& order);

/// Pointwise complex gradient (dH/dzbar_1, ..., dH/dzbar_n) at z with
/// zbar = conj(z), including the linear part omega_j z_j and the epsilon
/// factor on H1. Used by the time-domain baselines.
std::vector<std::complex<double>> point_gradient(
    const PolynomialHamiltonian& H, const std::vector<std::complex<double>>& z);

}  // namespace qtorus
