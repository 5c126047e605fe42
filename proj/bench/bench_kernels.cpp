// Times each OpenMP kernel against its serial reference and reports the
// speedup together with the maximum output difference (always 0: the
// parallel paths are bitwise-deterministic).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "qtorus/diagnostics.hpp"
#include "qtorus/presets.hpp"
#include "qtorus/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace qtorus;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_ms(F&& f) {
  double t0 = now_ms();
  f();
  return now_ms() - t0;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

void report(const char* name, std::size_t size, double serial_ms, double omp_ms,
            double diff) {
  std::printf("%-22s %10zu %12.1f %12.1f %8.2fx %10.3g\n", name, size, serial_ms,
              omp_ms, serial_ms / std::max(omp_ms, 1e-9), diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run serially\n");
#endif
  std::printf("%-22s %10s %12s %12s %9s %10s\n", "kernel", "size", "serial(ms)",
              "openmp(ms)", "speedup", "max|diff|");

  // operator assembly on a mid-size two-frequency box
  {
    ExperimentConfig pc = preset_config("henon-heiles");
    SolverState st = run(pc.system, pc.solver);
    const IterationRecord& rec = st.history.back();
    HessianKernels ker = hessian_kernels(pc.system, rec.zhat);
    ModeOrdering order(LatticeBox{12, 2});
    Matrix s_ser, s_par;
    double ts = time_ms([&] { s_ser = assemble_S_serial(ker, order); });
    double tp = time_ms([&] { s_par = assemble_S(ker, order); });
    report("assemble_S", order.rows(), ts, tp, max_diff(s_ser.data(), s_par.data()));
  }

  // dense factorization and inversion
  {
    std::mt19937_64 rng(1);
    const std::size_t n = 900;
    Matrix a(n, n);
    for (double& v : a.data()) v = double(rng() >> 11) * 0x1.0p-53 - 0.5;
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 8.0;
    std::vector<double> b(n, 1.0);
    std::vector<double> xs, xp;
    DenseLU* lu_serial = nullptr;
    DenseLU* lu_parallel = nullptr;
    double ts = time_ms([&] { lu_serial = new DenseLU(a, false); xs = lu_serial->solve(b); });
    double tp = time_ms([&] { lu_parallel = new DenseLU(a, true); xp = lu_parallel->solve(b); });
    report("lu_factor_solve", n, ts, tp, max_diff(xs, xp));

    Matrix inv_s, inv_p;
    double tis = time_ms([&] { inv_s = lu_serial->inverse(false); });
    double tip = time_ms([&] { inv_p = lu_parallel->inverse(true); });
    report("lu_inverse", n, tis, tip, max_diff(inv_s.data(), inv_p.data()));
    delete lu_serial;
    delete lu_parallel;
  }

  // lattice scans
  {
    std::vector<double> omega{1.0, 0.5 * (1.0 + std::sqrt(5.0))};
    DiophantineResult rs, rp;
    double ts = time_ms([&] {
      for (int rep = 0; rep < 200; ++rep) rs = diophantine_check_serial(omega, 20, 2.0);
    });
    double tp = time_ms([&] {
      for (int rep = 0; rep < 200; ++rep) rp = diophantine_check(omega, 20, 2.0);
    });
    report("diophantine_scan", 200, ts, tp, std::fabs(rs.margin - rp.margin));
  }

  {
    FrequencyDomain dom{{1.0, 1.0}, {2.0, 2.0}};
    double fs = 0.0, fp = 0.0;
    double ts = time_ms([&] { fs = resonant_measure_mc_serial(dom, 8, 2.0, 40000, 9); });
    double tp = time_ms([&] { fp = resonant_measure_mc(dom, 8, 2.0, 40000, 9); });
    report("resonant_measure_mc", 40000, ts, tp, std::fabs(fs - fp));
  }

  // localization ratio scan over a dense inverse
  {
    ExperimentConfig pc = preset_config("duffing");
    FourierVector z(1);
    z.set(ModeIndex{0, MultiIndex({1})}, std::exp(-1.0));
    TangentOperator T = assemble_T(pc.system, z, pc.system.omega0, {1.05},
                                   LatticeBox{400, 1}, 1.0,
                                   pc.solver.operator_config());
    OperatorSolver solver(T);
    Matrix inv = solver.lu().inverse();
    double ws = 0.0, wp = 0.0;
    double ts = time_ms([&] { ws = localization_worst_ratio_serial(inv, *T.order, 0.5, 400); });
    double tp = time_ms([&] { wp = localization_worst_ratio(inv, *T.order, 0.5, 400); });
    report("localization_scan", T.rows(), ts, tp, std::fabs(ws - wp));
  }

  return 0;
}
