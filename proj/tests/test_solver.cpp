#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtorus/presets.hpp"
#include "qtorus/solver.hpp"

using namespace qtorus;

namespace {
const double kA = std::exp(-1.0);
}

TEST_SUITE_BEGIN("solver");

TEST_CASE("q_update solves the resonant equations exactly") {
  PolynomialHamiltonian duf = preset_config("duffing").system;
  auto w = q_update(duf, FourierVector(1), kA, 1.0);
  CHECK(w[0] == doctest::Approx(1.0 + 0.75 * std::exp(-2.0)).epsilon(1e-14));

  PolynomialHamiltonian hh = preset_config("henon-heiles").system;
  auto w2 = q_update(hh, FourierVector(2), kA, 0.1);
  CHECK(w2[0] == hh.omega0[0]);  // bitwise: the resonant field vanishes
  CHECK(w2[1] == hh.omega0[1]);

  auto w3 = q_update(duf, FourierVector(1), kA, 0.0);
  CHECK(w3[0] == duf.omega0[0]);
}

TEST_CASE("q_update leaves a vanishing Q-equation residual") {
  std::mt19937_64 rng(71);
  for (int c = 0; c < 20; ++c) {
    std::size_t n = 1 + rng() % 2;
    PolynomialHamiltonian H = oracle::random_hamiltonian(rng, n, 4, 0.7);
    FourierVector zp(n);
    for (int e = 0; e < 5; ++e) {
      std::vector<int> k(n);
      for (std::size_t i = 0; i < n; ++i) k[i] = int(rng() % 5) - 2;
      ModeIndex m{int(rng() % n), MultiIndex(k)};
      if (!is_resonant(m)) zp.set(m, oracle::urand(rng, -0.2, 0.2));
    }
    std::vector<double> omega = q_update(H, zp, kA, H.epsilon);
    std::vector<double> Xq =
        resonant_field(vector_field(H, with_resonant_amplitudes(zp, n, kA)));
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::fabs((-omega[j] + H.omega0[j]) * kA + H.epsilon * Xq[j]) <= 1e-14);
  }
}

TEST_CASE("residual_F matches the hand expansion at the initial state") {
  PolynomialHamiltonian duf = preset_config("duffing").system;
  FourierVector zp(1);
  std::vector<double> w1 = q_update(duf, zp, kA, 1.0);
  FourierVector F = residual_F(duf, zp, duf.omega0, w1, 1.0, LatticeBox{1, 1}, kA);
  const double a3 = kA * kA * kA;
  // with zp = 0 the residual is eps * Xp: the resonant k=1 entry is excluded
  CHECK(F.get(0, MultiIndex({3})) == doctest::Approx(0.25 * a3).epsilon(1e-14));
  CHECK(F.get(0, MultiIndex({-1})) == doctest::Approx(0.75 * a3).epsilon(1e-14));
  CHECK(F.get(0, MultiIndex({-3})) == doctest::Approx(0.25 * a3).epsilon(1e-14));
  CHECK(F.support().count(ModeIndex{0, MultiIndex({1})}) == 0);
  CHECK(F.support_size() == 3);
}

TEST_CASE("residual_F reduces to the linear formula when eps = 0") {
  std::mt19937_64 rng(73);
  PolynomialHamiltonian H;
  H.n = 2;
  H.omega0 = {1.0, std::sqrt(2.0)};
  FourierVector zp(2);
  for (int e = 0; e < 6; ++e) {
    std::vector<int> k{int(rng() % 5) - 2, int(rng() % 5) - 2};
    ModeIndex m{int(rng() % 2), MultiIndex(k)};
    if (!is_resonant(m)) zp.set(m, oracle::urand(rng, -1, 1));
  }
  FourierVector F = residual_F(H, zp, H.omega0, H.omega0, 0.0, LatticeBox{2, 2}, kA);
  for (const auto& [m, v] : zp.support()) {
    double dot = 0.0;
    for (std::size_t i = 0; i < 2; ++i) dot += double(m.k[i]) * H.omega0[i];
    CHECK(F.get(m) == doctest::Approx((-dot + H.omega0[std::size_t(m.j)]) * v).epsilon(1e-14));
  }

  FourierVector zero_F = residual_F(H, FourierVector(2), H.omega0, H.omega0, 0.0,
                                    LatticeBox{1, 2}, kA);
  CHECK(zero_F.norm_l2() == 0.0);
}

TEST_CASE("p_update: eps = 0 leaves the zero iterate unchanged") {
  PolynomialHamiltonian H;
  H.n = 1;
  H.omega0 = {1.0};
  H.epsilon = 0.0;
  SolverConfig cfg;
  FourierVector zp(1);
  FourierVector F = residual_F(H, zp, H.omega0, H.omega0, 0.0, LatticeBox{1, 1}, kA);
  PStepResult step = p_update(H, zp, H.omega0, F, 1, cfg);
  CHECK(step.zhat_p.support_size() == 0);
  CHECK(step.step_l2 == 0.0);
  CHECK(step.N_next == 2);
}

TEST_CASE("first Newton step agrees with an independent dense solve") {
  PolynomialHamiltonian duf = preset_config("duffing").system;
  SolverConfig cfg;
  cfg.M = 4;  // one step already reaches the k = +-3 modes
  cfg.N0 = 1;
  FourierVector zp(1);
  std::vector<double> w1 = q_update(duf, zp, kA, duf.epsilon);
  FourierVector F = residual_F(duf, zp, duf.omega0, w1, duf.epsilon, LatticeBox{1, 1}, kA);
  PStepResult step = p_update(duf, zp, w1, F, 1, cfg);
  REQUIRE(step.N_next == 4);

  // oracle: materialize the same operator and run a separate Gauss solver
  TangentOperator T = assemble_T(duf, with_resonant_amplitudes(zp, 1, kA),
                                 duf.omega0, w1, LatticeBox{4, 1}, duf.epsilon,
                                 cfg.operator_config());
  std::vector<double> rhs(T.rows());
  for (std::size_t r = 0; r < T.rows(); ++r)
    rhs[r] = project(F, 4).get(T.order->mode(r));
  std::vector<double> delta = oracle::gauss_solve(materialize(T), rhs);
  for (std::size_t r = 0; r < T.rows(); ++r)
    CHECK(step.zhat_p.get(T.order->mode(r)) == doctest::Approx(-delta[r]).epsilon(1e-12));

  // to first order the k=3 coefficient is -eps*X(3)/D(3)
  double d3 = T.D[T.order->row_of(ModeIndex{0, MultiIndex({3})})];
  double first_order = -duf.epsilon * 0.25 * std::exp(-3.0) / d3;
  CHECK(step.zhat_p.get(0, MultiIndex({3})) ==
        doctest::Approx(first_order).epsilon(0.1));
}

TEST_CASE("run: eps = 0 terminates immediately with the input frequency") {
  PolynomialHamiltonian H = preset_config("duffing").system;
  H.epsilon = 0.0;
  SolverConfig cfg;
  SolverState st = run(H, cfg);
  CHECK(st.termination == Termination::kConverged);
  REQUIRE(st.history.size() == 1);
  CHECK(st.history[0].r == 0);
  CHECK(st.history[0].residual_l2 == 0.0);
  CHECK(st.omega_final == H.omega0);
  CHECK(st.zhat_final.get(0, MultiIndex({1})) == kA);
}

TEST_CASE("run: quartic oscillator converges super-exponentially") {
  ExperimentConfig pc = preset_config("duffing");
  SolverState st = run(pc.system, pc.solver);
  CHECK(st.termination == Termination::kConverged);
  REQUIRE(st.history.size() >= 4);
  CHECK(st.history[1].omega[0] == doctest::Approx(1.0 + 0.75 * std::exp(-2.0)).epsilon(1e-13));
  for (std::size_t i = 0; i + 1 < st.history.size(); ++i) {
    const auto& a = st.history[i];
    const auto& b = st.history[i + 1];
    if (a.residual_l2 > 1e-13) CHECK(b.residual_l2 < a.residual_l2);
    // support growth law and resonant pinning
    CHECK(b.N == std::min(pc.solver.M * a.N, pc.solver.N_cap));
    CHECK(b.zhat.support_radius() <= b.N);
  }
  for (const IterationRecord& rec : st.history)
    CHECK(rec.zhat.get(0, MultiIndex({1})) == kA);
}

TEST_CASE("run: the first coupled frequency update is the identity") {
  ExperimentConfig pc = preset_config("henon-heiles");
  pc.solver.max_iter = 2;
  pc.solver.tol_residual = 1e-30;  // force both steps
  SolverState st = run(pc.system, pc.solver);
  REQUIRE(st.history.size() >= 3);
  CHECK(st.history[1].omega == st.history[0].omega);
  CHECK(st.history[2].omega != st.history[1].omega);
  for (const IterationRecord& rec : st.history) {
    CHECK(rec.zhat.get(0, MultiIndex({1, 0})) == kA);
    CHECK(rec.zhat.get(1, MultiIndex({0, 1})) == kA);
    CHECK(rec.zhat.support_radius() <= rec.N);
  }
}

TEST_CASE("evaluate_solution: circles, coefficient sums and conjugacy") {
  // eps = 0 state: z_j(t) = a e^{i om_j t}
  FourierVector z0 = with_resonant_amplitudes(FourierVector(2), 2, kA);
  std::vector<double> omega{1.0, std::sqrt(3.0)};
  Evaluation ev = evaluate_solution(z0, omega, 2.37);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(ev.z[j].real() == doctest::Approx(kA * std::cos(omega[j] * 2.37)).epsilon(1e-14));
    CHECK(ev.z[j].imag() == doctest::Approx(kA * std::sin(omega[j] * 2.37)).epsilon(1e-14));
    CHECK(ev.x[j] == doctest::Approx(-std::sqrt(2.0) * ev.z[j].imag()).epsilon(1e-15));
    CHECK(ev.y[j] == doctest::Approx(std::sqrt(2.0) * ev.z[j].real()).epsilon(1e-15));
  }

  std::mt19937_64 rng(79);
  for (int c = 0; c < 30; ++c) {
    FourierVector v = oracle::random_sparse_state(rng, 2, 3, 8, 0.7);
    // t = 0: plain coefficient sum
    Evaluation at0 = evaluate_solution(v, omega, 0.0);
    std::vector<double> sums(2, 0.0);
    for (const auto& [m, val] : v.support()) sums[std::size_t(m.j)] += val;
    CHECK(at0.z[0].real() == doctest::Approx(sums[0]).epsilon(1e-14));
    CHECK(at0.z[1].real() == doctest::Approx(sums[1]).epsilon(1e-14));
    CHECK(std::fabs(at0.z[0].imag()) <= 1e-14);

    // conjugacy: flip evaluates to the complex conjugate
    double t = oracle::urand(rng, -5, 5);
    Evaluation a = evaluate_solution(v, omega, t);
    Evaluation b = evaluate_solution(flip(v), omega, t);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(b.z[j].real() == doctest::Approx(a.z[j].real()).epsilon(1e-12));
      CHECK(b.z[j].imag() == doctest::Approx(-a.z[j].imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("argument checks on the solver entry points") {
  PolynomialHamiltonian H;
  H.n = 1;
  H.omega0 = {1.0};
  FourierVector outside(1);
  outside.set(ModeIndex{0, MultiIndex({5})}, 0.1);
  CHECK_THROWS_AS(residual_F(H, outside, H.omega0, H.omega0, 0.0, LatticeBox{2, 1}, kA),
                  std::invalid_argument);
  FourierVector resonant(1);
  resonant.set(ModeIndex{0, MultiIndex({1})}, 0.1);
  CHECK_THROWS_AS(with_resonant_amplitudes(resonant, 1, kA), std::invalid_argument);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.M = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.tol_residual = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.N_cap = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
