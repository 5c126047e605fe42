#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtorus/diagnostics.hpp"
#include "qtorus/presets.hpp"
#include "qtorus/solver.hpp"

using namespace qtorus;

namespace {

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));
const double kA = std::exp(-1.0);

// exhaustive scan written independently of the library path
DiophantineResult brute_force_scan(const std::vector<double>& omega, int M_box,
                                   double tau) {
  DiophantineResult res;
  std::size_t n = omega.size();
  int R = 2 * (M_box + 1);
  std::vector<int> k(n, -R);
  for (;;) {
    long l1 = 0;
    for (int e : k) l1 += std::abs(e);
    if (l1 != 0) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += double(k[i]) * omega[i];
      double prod = std::fabs(dot) * std::pow(double(l1), tau);
      if (prod < res.margin ||
          (prod == res.margin && res.worst_k.dim() == n &&
           l1 < res.worst_k.norm_l1())) {
        res.margin = prod;
        res.worst_k = MultiIndex(k);
      }
    }
    std::size_t i = n;
    bool done = true;
    while (i > 0) {
      --i;
      if (++k[i] <= R) {
        done = false;
        break;
      }
      k[i] = -R;
    }
    if (done) break;
  }
  res.ok = res.margin >= 1.0;
  return res;
}

}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("diophantine_check: exact resonance, integers, golden ratio") {
  auto bad = diophantine_check({1.0, 1.0}, 3, 2.0);
  CHECK(!bad.ok);
  CHECK(bad.margin == 0.0);
  CHECK(bad.worst_k.norm_l1() == 2);  // +-(1,-1) reaches zero first

  auto one = diophantine_check({1.0}, 10, 2.0);
  CHECK(one.ok);  // |k| * |k|^-2 >= 1 for integers

  auto gold = diophantine_check({1.0, kGolden}, 20, 2.0);
  CHECK(gold.ok);
  auto ref = brute_force_scan({1.0, kGolden}, 20, 2.0);
  CHECK(gold.margin == ref.margin);
  CHECK(gold.worst_k == ref.worst_k);
}

TEST_CASE("diophantine_check agrees with brute force on random frequencies") {
  std::mt19937_64 rng(83);
  for (int c = 0; c < 25; ++c) {
    std::size_t n = 1 + rng() % 2;
    std::vector<double> omega(n);
    for (double& w : omega) w = oracle::urand(rng, 0.5, 2.5);
    int M_box = 1 + int(rng() % 6);
    double tau = oracle::urand(rng, 1.0, 4.0);
    auto lib = diophantine_check(omega, M_box, tau);
    auto ref = brute_force_scan(omega, M_box, tau);
    CHECK(lib.ok == ref.ok);
    CHECK(lib.margin == ref.margin);
  }
}

TEST_CASE("nearly-resonant sets are nested in tau and in the box size") {
  std::mt19937_64 rng(89);
  for (int c = 0; c < 60; ++c) {
    std::vector<double> omega{oracle::urand(rng, 0.5, 2.0), oracle::urand(rng, 0.5, 2.0)};
    bool fail_t2 = !diophantine_check(omega, 4, 2.0).ok;
    bool fail_t3 = !diophantine_check(omega, 4, 3.0).ok;
    if (fail_t3) CHECK(fail_t2);  // failure at larger tau implies smaller
    bool fail_m2 = !diophantine_check(omega, 2, 2.0).ok;
    bool fail_m5 = !diophantine_check(omega, 5, 2.0).ok;
    if (fail_m2) CHECK(fail_m5);  // larger box scans a superset
  }
}

TEST_CASE("resonant_measure_mc: deterministic, monotone in tau, point mass") {
  FrequencyDomain dom{{1.0, 1.0}, {2.0, 2.0}};
  double f1 = resonant_measure_mc(dom, 4, 2.0, 3000, 123);
  double f2 = resonant_measure_mc(dom, 4, 2.0, 3000, 123);
  CHECK(f1 == f2);  // bit-exact for a fixed seed

  double g2 = resonant_measure_mc(dom, 4, 2.0, 3000, 99);
  double g4 = resonant_measure_mc(dom, 4, 4.0, 3000, 99);
  CHECK(g4 <= g2);

  FrequencyDomain point{{1.0, 1.0}, {1.0, 1.0}};
  CHECK(resonant_measure_mc(point, 3, 2.0, 64, 5) == 1.0);
}

TEST_CASE("gevrey_profile: initial state, zero vector, projection bound") {
  FourierVector z0 = with_resonant_amplitudes(FourierVector(2), 2, kA);
  GevreyProfile p = gevrey_profile(z0, 0.5);
  CHECK(p.sup == doctest::Approx(1.0).epsilon(1e-14));  // a * e^{1^s} = 1
  REQUIRE(p.shell_max.count(1) == 1);
  CHECK(p.shell_max.at(1) == doctest::Approx(kA).epsilon(1e-15));

  CHECK(gevrey_profile(FourierVector(1), 0.5).sup == 0.0);

  std::mt19937_64 rng(97);
  for (int c = 0; c < 200; ++c) {
    FourierVector v = oracle::random_sparse_state(rng, 2, 4, 9, 1.0);
    double s = oracle::urand(rng, 0.1, 0.9);
    int N = int(rng() % 5);
    CHECK(gevrey_profile(project(v, N), s).sup <= gevrey_profile(v, s).sup + 1e-15);
  }
  CHECK_THROWS_AS(gevrey_profile(z0, 1.5), std::invalid_argument);
}

TEST_CASE("condition_report: diagonal case passes and localizes") {
  PolynomialHamiltonian H;
  H.n = 1;
  H.omega0 = {1.0};
  FourierVector z = with_resonant_amplitudes(FourierVector(1), 1, kA);
  OperatorConfig ocfg;
  TangentOperator T = assemble_T(H, z, H.omega0, H.omega0, LatticeBox{3, 1}, 0.0, ocfg);
  DiagnosticsReport rep = condition_report(T, 0.5, 3);
  CHECK(rep.inversion_ok);  // ||T^-1|| = 1 and the N=3 threshold is ~e^4.18
  CHECK(rep.log_inverse_norm == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rep.localization_checked);
  CHECK(rep.localization_worst_ratio == 0.0);  // diagonal inverse
}

TEST_CASE("converged spectra decay shell by shell") {
  ExperimentConfig pc = preset_config("duffing");
  SolverState st = run(pc.system, pc.solver);
  GevreyProfile prof = gevrey_profile(st.zhat_final, 0.5);
  // the quartic solution excites odd harmonics only; maxima fall with |k|
  double prev = std::numeric_limits<double>::infinity();
  int populated = 0;
  for (const auto& [shell, value] : prof.shell_max) {
    if (shell < 1 || value == 0.0) continue;
    CHECK(value <= prev);
    prev = value;
    ++populated;
  }
  CHECK(populated >= 4);
}

TEST_CASE("condition_report: solver operators stay finite") {
  ExperimentConfig pc = preset_config("duffing");
  SolverState st = run(pc.system, pc.solver);
  // re-assemble the operator of the first Newton step (box N=2)
  const IterationRecord& rec = st.history[0];
  TangentOperator T = assemble_T(pc.system, rec.zhat, pc.system.omega0,
                                 rec.omega_next, LatticeBox{2, 1},
                                 pc.system.epsilon, pc.solver.operator_config());
  DiagnosticsReport rep = condition_report(T, 0.5, 2);
  CHECK(std::isfinite(rep.log_inverse_norm));
  CHECK(std::isfinite(rep.localization_worst_ratio));
}

TEST_CASE("condition_report flags a constructed near-resonance") {
  // <k, omega> = 1e-9 at k = (1,-1) puts a 1e-9 divisor inside Lambda_3
  PolynomialHamiltonian H;
  H.n = 2;
  H.omega0 = {1.0, 1.0 - 1e-9};
  FourierVector z = with_resonant_amplitudes(FourierVector(2), 2, kA);
  OperatorConfig ocfg;
  TangentOperator T = assemble_T(H, z, H.omega0, H.omega0, LatticeBox{3, 2}, 0.0, ocfg);
  DiagnosticsReport rep = condition_report(T, 0.5, 3);
  CHECK(!rep.inversion_ok);
  CHECK(rep.log_inverse_norm > std::log(1e8));
}

TEST_CASE("frequency domain validation") {
  FrequencyDomain bad{{1.0, 2.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  FrequencyDomain empty{{}, {}};
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("argument checks on the scan entry points") {
  CHECK_THROWS_AS(diophantine_check({1.0}, 0, 2.0), std::invalid_argument);
  FrequencyDomain dom{{1.0}, {2.0}};
  CHECK_THROWS_AS(resonant_measure_mc(dom, 3, 2.0, 0, 1), std::invalid_argument);
}

TEST_SUITE_END();
