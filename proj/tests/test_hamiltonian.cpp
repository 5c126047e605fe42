#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "qtorus/diagnostics.hpp"
#include "qtorus/hamiltonian.hpp"
#include "qtorus/presets.hpp"

using namespace qtorus;

namespace {

const double kA = std::exp(-1.0);  // initial amplitude e^-1

FourierVector duffing_initial_state() {
  FourierVector z(1);
  z.set(ModeIndex{0, MultiIndex({1})}, kA);
  return z;
}

FourierVector hh_initial_state() {
  FourierVector z(2);
  z.set(ModeIndex{0, MultiIndex({1, 0})}, kA);
  z.set(ModeIndex{1, MultiIndex({0, 1})}, kA);
  return z;
}

}  // namespace

TEST_SUITE_BEGIN("hamiltonian");

TEST_CASE("convolve: delta identity, single products, cube expansion") {
  LatticeFn delta{{MultiIndex({0}), 1.0}};
  LatticeFn v{{MultiIndex({-2}), 0.3}, {MultiIndex({1}), -1.2}};
  CHECK(convolve(delta, v) == v);

  double a = 0.7;
  LatticeFn u{{MultiIndex({1}), a}};
  LatticeFn uu = convolve(u, u);
  REQUIRE(uu.size() == 1);
  CHECK(uu.at(MultiIndex({2})) == doctest::Approx(a * a).epsilon(1e-15));

  // (x + x^-1)^3 expanded by hand: x^3 + 3x + 3x^-1 + x^-3
  LatticeFn w{{MultiIndex({-1}), a}, {MultiIndex({1}), a}};
  LatticeFn cube = convolve(convolve(w, w), w);
  CHECK(cube.at(MultiIndex({3})) == doctest::Approx(a * a * a).epsilon(1e-14));
  CHECK(cube.at(MultiIndex({1})) == doctest::Approx(3 * a * a * a).epsilon(1e-14));
  CHECK(cube.at(MultiIndex({-1})) == doctest::Approx(3 * a * a * a).epsilon(1e-14));
  CHECK(cube.at(MultiIndex({-3})) == doctest::Approx(a * a * a).epsilon(1e-14));
}

TEST_CASE("convolve is commutative and bilinear") {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 50; ++c) {
    LatticeFn u, v;
    for (int e = 0; e < 4; ++e) {
      u[MultiIndex({int(rng() % 7) - 3, int(rng() % 7) - 3})] = oracle::urand(rng, -1, 1);
      v[MultiIndex({int(rng() % 7) - 3, int(rng() % 7) - 3})] = oracle::urand(rng, -1, 1);
    }
    LatticeFn uv = convolve(u, v), vu = convolve(v, u);
    for (const auto& [k, val] : uv)
      CHECK(val == doctest::Approx(vu.at(k)).epsilon(1e-13));
    // scaling in the first argument
    LatticeFn u2 = u;
    for (auto& [k, val] : u2) val *= 2.0;
    LatticeFn u2v = convolve(u2, v);
    for (const auto& [k, val] : u2v)
      CHECK(val == doctest::Approx(2.0 * uv.at(k)).epsilon(1e-13));
  }
}

TEST_CASE("convolve respects the mode budget") {
  LatticeFn u, v;
  for (int i = 0; i < 40; ++i) {
    u[MultiIndex({i})] = 1.0;
    v[MultiIndex({3 * i})] = 1.0;
  }
  CHECK_THROWS_AS(convolve(u, v, 100), CapacityError);
}

TEST_CASE("vector_field reproduces the quartic oscillator by hand") {
  PolynomialHamiltonian H = preset_config("duffing").system;
  FourierVector X = vector_field(H, duffing_initial_state());
  const double a3 = kA * kA * kA;
  CHECK(X.get(0, MultiIndex({3})) == doctest::Approx(0.25 * a3).epsilon(1e-14));
  CHECK(X.get(0, MultiIndex({1})) == doctest::Approx(0.75 * a3).epsilon(1e-14));
  CHECK(X.get(0, MultiIndex({-1})) == doctest::Approx(0.75 * a3).epsilon(1e-14));
  CHECK(X.get(0, MultiIndex({-3})) == doctest::Approx(0.25 * a3).epsilon(1e-14));
  CHECK(X.support_size() == 4);
  // X(1) = 3/(4 e^3) ~ 0.0373
  CHECK(X.get(0, MultiIndex({1})) == doctest::Approx(0.75 * std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("vector_field support for the two-frequency cubic coupling") {
  PolynomialHamiltonian H = preset_config("henon-heiles").system;
  FourierVector X = vector_field(H, hh_initial_state());

  std::set<std::vector<int>> supp1, supp2;
  for (const auto& [m, v] : X.support())
    (m.j == 0 ? supp1 : supp2).insert(m.k.entries());
  CHECK(supp1 == std::set<std::vector<int>>{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
  CHECK(supp2 == std::set<std::vector<int>>{{0, 0}, {2, 0}, {-2, 0}, {0, 2}, {0, -2}});
  // the equal-amplitude contributions at the origin cancel exactly
  CHECK(X.get(1, MultiIndex({0, 0})) == 0.0);
}

TEST_CASE("vector_field of an empty perturbation is empty") {
  PolynomialHamiltonian H;
  H.n = 2;
  H.omega0 = {1.0, 1.5};
  CHECK(vector_field(H, hh_initial_state()).support_size() == 0);
}

TEST_CASE("resonant_field reads the basis-mode coefficients") {
  PolynomialHamiltonian H = preset_config("duffing").system;
  auto q = resonant_field(vector_field(H, duffing_initial_state()));
  REQUIRE(q.size() == 1);
  CHECK(q[0] == doctest::Approx(0.75 * std::exp(-3.0)).epsilon(1e-14));

  PolynomialHamiltonian hh = preset_config("henon-heiles").system;
  auto q2 = resonant_field(vector_field(hh, hh_initial_state()));
  CHECK(q2[0] == 0.0);
  CHECK(q2[1] == 0.0);

  CHECK(resonant_field(FourierVector(2)) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("hessian_kernels of the quartic oscillator") {
  PolynomialHamiltonian H = preset_config("duffing").system;
  HessianKernels ker = hessian_kernels(H, duffing_initial_state());
  const double a2 = kA * kA;
  // d2H1/dz dzbar = (3/4)(z+zbar)^2
  CHECK(lattice_get(ker.toeplitz[0][0], MultiIndex({2})) == doctest::Approx(0.75 * a2).epsilon(1e-14));
  CHECK(lattice_get(ker.toeplitz[0][0], MultiIndex({0})) == doctest::Approx(1.5 * a2).epsilon(1e-14));
  CHECK(lattice_get(ker.toeplitz[0][0], MultiIndex({-2})) == doctest::Approx(0.75 * a2).epsilon(1e-14));
  // d2H1/dzbar^2 coincides by the symmetry of (z+zbar)^2
  for (int m : {-2, 0, 2})
    CHECK(lattice_get(ker.hankel[0][0], MultiIndex({m})) ==
          doctest::Approx(lattice_get(ker.toeplitz[0][0], MultiIndex({m}))).epsilon(1e-14));
}

TEST_CASE("degree-3 kernels vanish at the zero state") {
  std::mt19937_64 rng(9);
  PolynomialHamiltonian H = oracle::random_hamiltonian(rng, 2, 3, 1.0);
  HessianKernels ker = hessian_kernels(H, FourierVector(2));
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (const auto& [k, v] : ker.toeplitz[j][i]) CHECK(v == 0.0);
      for (const auto& [k, v] : ker.hankel[j][i]) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("kernel symmetries under component swap") {
  std::mt19937_64 rng(13);
  for (int c = 0; c < 25; ++c) {
    PolynomialHamiltonian H = oracle::random_hamiltonian(rng, 2, 4, 1.0);
    FourierVector z = oracle::random_sparse_state(rng, 2, 2, 5, 0.4);
    HessianKernels ker = hessian_kernels(H, z);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (const auto& [m, v] : ker.toeplitz[i][j])
          CHECK(v == doctest::Approx(lattice_get(ker.toeplitz[j][i], -m)).epsilon(1e-12));
        for (const auto& [m, v] : ker.hankel[i][j])
          CHECK(v == doctest::Approx(lattice_get(ker.hankel[j][i], m)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("q_gradient entry for the quartic oscillator") {
  PolynomialHamiltonian H = preset_config("duffing").system;
  ModeOrdering order(LatticeBox{3, 1});
  auto g = q_gradient(H, duffing_initial_state(), order);
  std::size_t col = order.row_of(ModeIndex{0, MultiIndex({-1})});
  REQUIRE(col != ModeOrdering::npos);
  // toeplitz(2) + hankel(0) = (3/4)e^-2 + (3/2)e^-2
  double expect = 0.75 * std::exp(-2.0) + 1.5 * std::exp(-2.0);
  CHECK(g[0][col] == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("q_gradient: zero perturbation gives a zero matrix") {
  PolynomialHamiltonian H;
  H.n = 1;
  H.omega0 = {1.0};
  ModeOrdering order(LatticeBox{2, 1});
  auto g = q_gradient(H, duffing_initial_state(), order);
  for (double v : g[0]) CHECK(v == 0.0);
}

TEST_CASE("q_gradient matches central finite differences of the vector field") {
  std::mt19937_64 rng(17);
  for (int c = 0; c < 8; ++c) {
    std::size_t n = 1 + rng() % 2;
    PolynomialHamiltonian H = oracle::random_hamiltonian(rng, n, 4, 1.0);
    FourierVector z = oracle::random_sparse_state(rng, n, 2, 4, 0.4);
    for (std::size_t j = 0; j < n; ++j)
      z.set(ModeIndex{int(j), MultiIndex::unit(n, j)}, kA);
    ModeOrdering order(LatticeBox{2, n});
    auto g = q_gradient(H, project(z, 2), order);

    const double h = 1e-6;
    for (std::size_t m = 0; m < n; ++m) {
      const MultiIndex em = MultiIndex::unit(n, m);
      for (std::size_t col = 0; col < order.rows(); col += 3) {
        FourierVector zp = project(z, 2), zm = project(z, 2);
        zp.add(order.mode(col), h);
        zm.add(order.mode(col), -h);
        double fd = (vector_field(H, zp).get(int(m), em) -
                     vector_field(H, zm).get(int(m), em)) /
                    (2.0 * h);
        CHECK(g[m][col] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("lattice vector field agrees with pointwise sampling plus DFT") {
  std::mt19937_64 rng(23);
  for (int c = 0; c < 5; ++c) {
    std::size_t n = 1 + rng() % 2;
    PolynomialHamiltonian H = oracle::random_hamiltonian(rng, n, 4, 1.0);
    FourierVector z = oracle::random_sparse_state(rng, n, 2, 4, 0.5);
    FourierVector X = vector_field(H, z);
    const int L = 16;  // bandwidth of the cubic image of radius-2 states is < 8
    for (const auto& [m, v] : X.support())
      CHECK(v == doctest::Approx(oracle::dft_vector_field_coeff(H, z, m.j, m.k, L))
                     .epsilon(1e-8));
    // spot-check a few absent coefficients really vanish
    CHECK(oracle::dft_vector_field_coeff(H, z, 0, MultiIndex(std::vector<int>(n, 7)), L) ==
          doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("Gevrey decay survives the vector field evaluation") {
  std::mt19937_64 rng(29);
  const double s = 0.5;
  for (int c = 0; c < 10; ++c) {
    std::size_t n = 1 + rng() % 2;
    PolynomialHamiltonian H = oracle::random_hamiltonian(rng, n, 4, 1.0);
    FourierVector z(n);
    for (int e = 0; e < 6; ++e) {
      std::vector<int> k(n);
      for (std::size_t i = 0; i < n; ++i) k[i] = int(rng() % 5) - 2;
      long l1 = MultiIndex(k).norm_l1();
      double cap = std::exp(-std::pow(double(l1), s));
      z.set(ModeIndex{int(rng() % n), MultiIndex(k)}, oracle::urand(rng, -cap, cap));
    }
    CHECK(gevrey_profile(z, s).sup <= 1.0 + 1e-12);
    double sup = gevrey_profile(vector_field(H, z), s).sup;
    CHECK(std::isfinite(sup));
  }
}

TEST_CASE("power-mean inequality used by the convolution bounds") {
  std::mt19937_64 rng(31);
  for (int c = 0; c < 2000; ++c) {
    double a = oracle::urand(rng, 0.0, 50.0);
    double b = oracle::urand(rng, 0.0, 50.0);
    double s = oracle::urand(rng, 1e-3, 1.0 - 1e-3);
    double lhs = std::pow(a, s) + std::pow(b, s) - std::pow(a + b, s);
    double rhs = (2.0 - std::pow(2.0, s)) * std::pow(std::min(a, b), s);
    CHECK(lhs >= rhs - 1e-12);
  }
}

TEST_CASE("hamiltonian validation rejects malformed input") {
  PolynomialHamiltonian H;
  H.n = 1;
  H.omega0 = {1.0};
  H.terms = {Monomial{1.0, MultiIndex({1}), MultiIndex({1})}};  // degree 2
  CHECK_THROWS_AS(H.validate(), std::invalid_argument);
  H.terms = {Monomial{1.0, MultiIndex({3, 0}), MultiIndex({0, 0})}};  // wrong n
  CHECK_THROWS_AS(H.validate(), std::invalid_argument);
  H.terms.clear();
  H.epsilon = -0.5;
  CHECK_THROWS_AS(H.validate(), std::invalid_argument);
}

TEST_SUITE_END();
