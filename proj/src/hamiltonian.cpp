#include "qtorus/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace qtorus {

namespace {

// Directed view of a monomial: coefficient c on the single product
// z^A zbar^B. Each stored monomial expands to itself and, when alpha and
// beta differ, its symmetric partner.
struct DirectedTerm {
  double c;
  MultiIndex A;
  MultiIndex B;
};

std::vector<DirectedTerm> directed_terms(const PolynomialHamiltonian& H) {
  std::vector<DirectedTerm> out;
  out.reserve(2 * H.terms.size());
  for (const Monomial& t : H.terms) {
    out.push_back({t.coeff, t.alpha, t.beta});
    if (t.alpha != t.beta) out.push_back({t.coeff, t.beta, t.alpha});
  }
  return out;
}

MultiIndex decrement(const MultiIndex& m, std::size_t at, int by = 1) {
  std::vector<int> e = m.entries();
  e[at] -= by;
  return MultiIndex(std::move(e));
}

// scale * product over i of u_i^{*A_i} * v_i^{*B_i} with * the lattice
// convolution; the empty product is the delta at the origin.
LatticeFn monomial_product(double scale, const MultiIndex& A, const MultiIndex& B,
                           const std::vector<LatticeFn>& u,
                           const std::vector<LatticeFn>& v, std::size_t n,
                           std::size_t budget) {
  LatticeFn acc;
  acc[MultiIndex::zero(n)] = scale;
  for (std::size_t i = 0; i < n; ++i)
    for (int p = 0; p < A[i]; ++p) acc = convolve(acc, u[i], budget);
  for (std::size_t i = 0; i < n; ++i)
    for (int p = 0; p < B[i]; ++p) acc = convolve(acc, v[i], budget);
  return acc;
}

void accumulate(LatticeFn& into, const LatticeFn& from) {
  for (const auto& [k, val] : from) into[k] += val;
}

std::vector<LatticeFn> split_components(const FourierVector& zhat) {
  std::vector<LatticeFn> comps(zhat.dim());
  for (const auto& [m, val] : zhat.support()) comps[std::size_t(m.j)][m.k] = val;
  return comps;
}

}  // namespace

void PolynomialHamiltonian::validate() const {
  if (n == 0) throw std::invalid_argument("hamiltonian: dimension must be >= 1");
  if (omega0.size() != n)
    throw std::invalid_argument("hamiltonian: omega0 length does not match n");
  for (double w : omega0)
    if (!std::isfinite(w)) throw std::invalid_argument("hamiltonian: omega0 entry not finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("hamiltonian: epsilon must be finite and >= 0");
  for (const Monomial& t : terms) {
    if (t.alpha.dim() != n || t.beta.dim() != n)
      throw std::invalid_argument("hamiltonian: monomial exponent length does not match n");
    for (std::size_t i = 0; i < n; ++i)
      if (t.alpha[i] < 0 || t.beta[i] < 0)
        throw std::invalid_argument("hamiltonian: monomial exponents must be non-negative");
    if (!std::isfinite(t.coeff))
      throw std::invalid_argument("hamiltonian: monomial coefficient not finite");
    if (t.degree() < 3)
      throw std::invalid_argument("hamiltonian: perturbation terms need total degree >= 3");
  }
}

LatticeFn convolve(const LatticeFn& u, const LatticeFn& v, std::size_t budget) {
  LatticeFn out;
  for (const auto& [ku, au] : u) {
    for (const auto& [kv, av] : v) {
      out[ku + kv] += au * av;
      if (out.size() > budget)
        throw CapacityError("convolution support exceeds mode budget");
    }
  }
  return out;
}

double lattice_get(const LatticeFn& f, const MultiIndex& k) {
  auto it = f.find(k);
  return it == f.end() ? 0.0 : it->second;
}

FourierVector vector_field(const PolynomialHamiltonian& H,
                           const FourierVector& zhat, std::size_t budget) {
  if (zhat.dim() != H.n)
    throw std::invalid_argument("vector_field: dimension mismatch");
  const std::vector<LatticeFn> u = split_components(zhat);
  const std::vector<LatticeFn> v = split_components(flip(zhat));

  FourierVector X(H.n);
  for (const DirectedTerm& t : directed_terms(H)) {
    for (std::size_t j = 0; j < H.n; ++j) {
      if (t.B[j] < 1) continue;
      LatticeFn contrib = monomial_product(t.c * double(t.B[j]), t.A,
                                           decrement(t.B, j), u, v, H.n, budget);
      for (const auto& [k, val] : contrib) X.add(ModeIndex{int(j), k}, val);
    }
  }
  return X;
}

std::vector<double> resonant_field(const FourierVector& X) {
  std::vector<double> q(X.dim());
  for (std::size_t j = 0; j < X.dim(); ++j)
    q[j] = X.get(int(j), MultiIndex::unit(X.dim(), j));
  return q;
}

HessianKernels hessian_kernels(const PolynomialHamiltonian& H,
                               const FourierVector& zhat, std::size_t budget) {
  if (zhat.dim() != H.n)
    throw std::invalid_argument("hessian_kernels: dimension mismatch");
  const std::vector<LatticeFn> u = split_components(zhat);
  const std::vector<LatticeFn> v = split_components(flip(zhat));

  HessianKernels ker;
  ker.n = H.n;
  ker.toeplitz.assign(H.n, std::vector<LatticeFn>(H.n));
  ker.hankel.assign(H.n, std::vector<LatticeFn>(H.n));

  for (const DirectedTerm& t : directed_terms(H)) {
    for (std::size_t j = 0; j < H.n; ++j) {
      if (t.B[j] < 1) continue;
      const MultiIndex Bj = decrement(t.B, j);
      // d^2/dz_i dzbar_j: A_i * B_j * z^{A-e_i} zbar^{B-e_j}
      for (std::size_t i = 0; i < H.n; ++i) {
        if (t.A[i] < 1) continue;
        double c = t.c * double(t.B[j]) * double(t.A[i]);
        accumulate(ker.toeplitz[j][i],
                   monomial_product(c, decrement(t.A, i), Bj, u, v, H.n, budget));
      }
      // d^2/dzbar_i dzbar_j: B_i * B_j with the diagonal falling factorial
      for (std::size_t i = 0; i < H.n; ++i) {
        if (Bj[i] < 1) continue;
        double c = t.c * double(t.B[j]) * double(Bj[i]);
        accumulate(ker.hankel[j][i],
                   monomial_product(c, t.A, decrement(Bj, i), u, v, H.n, budget));
      }
    }
  }
  return ker;
}

std::vector<std::vector<double>> q_gradient(const PolynomialHamiltonian& H,
                                            const FourierVector& zhat,
                                            const ModeOrdering& order) {
  HessianKernels ker = hessian_kernels(H, zhat);
  std::vector<std::vector<double>> g(H.n, std::vector<double>(order.rows(), 0.0));
  for (std::size_t m = 0; m < H.n; ++m) {
    const MultiIndex em = MultiIndex::unit(H.n, m);
    for (std::size_t col = 0; col < order.rows(); ++col) {
      const ModeIndex& mc = order.mode(col);
      std::size_t i = std::size_t(mc.j);
      g[m][col] = lattice_get(ker.toeplitz[m][i], em - mc.k) +
                  lattice_get(ker.hankel[m][i], em + mc.k);
    }
  }
  return g;
}

std::vector<std::complex<double>> point_gradient(
    const PolynomialHamiltonian& H, const std::vector<std::complex<double>>& z) {
  using C = std::complex<double>;
  if (z.size() != H.n) throw std::invalid_argument("point_gradient: dimension mismatch");
  std::vector<C> zbar(H.n);
  for (std::size_t i = 0; i < H.n; ++i) zbar[i] = std::conj(z[i]);

  auto ipow = [](C base, int e) {
    C r = 1.0;
    for (int p = 0; p < e; ++p) r *= base;
    return r;
  };

  std::vector<C> G(H.n);
  for (std::size_t j = 0; j < H.n; ++j) G[j] = H.omega0[j] * z[j];
  for (const DirectedTerm& t : directed_terms(H)) {
    for (std::size_t j = 0; j < H.n; ++j) {
      if (t.B[j] < 1) continue;
      C prod = t.c * double(t.B[j]);
      for (std::size_t i = 0; i < H.n; ++i) prod *= ipow(z[i], t.A[i]);
      for (std::size_t i = 0; i < H.n; ++i)
        prod *= ipow(zbar[i], t.B[i] - (i == j ? 1 : 0));
      G[j] += H.epsilon * prod;
    }
  }
  return G;
}

}  // namespace qtorus
