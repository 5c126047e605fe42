#include "qtorus/solver.hpp"

#include <cmath>

namespace qtorus {

void SolverConfig::validate() const {
  if (M < 2) throw std::invalid_argument("solver: M must be >= 2");
  if (N0 < 1) throw std::invalid_argument("solver: N0 must be >= 1");
  if (max_iter < 0) throw std::invalid_argument("solver: max_iter must be >= 0");
  if (!(tol_residual > 0.0)) throw std::invalid_argument("solver: tol_residual must be > 0");
  if (!(amplitude > 0.0)) throw std::invalid_argument("solver: amplitude must be > 0");
  if (N_cap < N0) throw std::invalid_argument("solver: N_cap must be >= N0");
  if (!(gevrey_s > 0.0 && gevrey_s < 1.0))
    throw std::invalid_argument("solver: gevrey_s must lie in (0,1)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIter: return "max_iter";
    case Termination::kNearResonance: return "near_resonance";
    case Termination::kConditionViolation: return "condition_violation";
  }
  return "unknown";
}

FourierVector with_resonant_amplitudes(const FourierVector& zhat_p, std::size_t n,
                                       double amplitude) {
  FourierVector z(n);
  for (const auto& [m, v] : zhat_p.support()) {
    if (is_resonant(m))
      throw std::invalid_argument("zhat_p carries a resonant mode");
    z.set(m, v);
  }
  for (std::size_t j = 0; j < n; ++j)
    z.set(ModeIndex{int(j), MultiIndex::unit(n, j)}, amplitude);
  return z;
}

std::vector<double> q_update(const PolynomialHamiltonian& H,
                             const FourierVector& zhat_p, double amplitude,
                             double epsilon) {
  FourierVector z = with_resonant_amplitudes(zhat_p, H.n, amplitude);
  std::vector<double> Xq = resonant_field(vector_field(H, z));
  std::vector<double> omega(H.n);
  for (std::size_t j = 0; j < H.n; ++j)
    omega[j] = H.omega0[j] + epsilon * Xq[j] / amplitude;
  return omega;
}

FourierVector residual_F(const PolynomialHamiltonian& H,
                         const FourierVector& zhat_p,
                         const std::vector<double>& omega0,
                         const std::vector<double>& omega_drift, double epsilon,
                         const LatticeBox& box, double amplitude,
                         std::size_t budget) {
  if (zhat_p.support_radius() > box.N)
    throw std::invalid_argument("residual_F: zhat_p not supported in the box");
  FourierVector z = with_resonant_amplitudes(zhat_p, H.n, amplitude);
  FourierVector X = vector_field(H, z, budget);
  FourierVector F(H.n);
  auto linear = [&](const ModeIndex& m) {
    double dot = 0.0;
    for (std::size_t i = 0; i < H.n; ++i) dot += double(m.k[i]) * omega_drift[i];
    return -dot + omega0[std::size_t(m.j)];
  };
  for (const auto& [m, v] : X.support()) {
    if (is_resonant(m)) continue;
    F.set(m, linear(m) * zhat_p.get(m) + epsilon * v);
  }
  // linear-part support can exceed supp X when eps*X vanishes there
  for (const auto& [m, v] : zhat_p.support()) {
    if (F.support().count(m)) continue;
    F.set(m, linear(m) * v + epsilon * X.get(m));
  }
  return F;
}

namespace {

std::vector<double> restrict_to_rows(const FourierVector& v,
                                     const ModeOrdering& order) {
  std::vector<double> out(order.rows(), 0.0);
  for (std::size_t r = 0; r < order.rows(); ++r) out[r] = v.get(order.mode(r));
  return out;
}

double norm_l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

namespace {

std::size_t newton_rows(int N, std::size_t n) {
  std::size_t pts = 1;
  for (std::size_t i = 0; i < n; ++i) pts *= std::size_t(2 * N + 1);
  return n * pts - n;
}

// next box half-width: grow by M up to N_cap, then clamp to the largest box
// whose non-resonant dimension fits dense_rows_cap
int next_half_width(int N_r, std::size_t n, const SolverConfig& config) {
  int N = std::min(config.M * N_r, config.N_cap);
  while (N > N_r && newton_rows(N, n) > config.dense_rows_cap) --N;
  if (newton_rows(N, n) > config.dense_rows_cap)
    throw CapacityError("Newton dimension " + std::to_string(newton_rows(N, n)) +
                        " exceeds dense_rows_cap at N=" + std::to_string(N));
  return N;
}

}  // namespace

PStepResult p_update(const PolynomialHamiltonian& H, const FourierVector& zhat_p,
                     const std::vector<double>& omega_next,
                     const FourierVector& F, int N_r, const SolverConfig& config) {
  PStepResult out;
  out.N_next = next_half_width(N_r, H.n, config);
  out.capped = out.N_next < std::min(config.M * N_r, config.N_cap);
  LatticeBox box{out.N_next, H.n};
  FourierVector z = with_resonant_amplitudes(zhat_p, H.n, config.amplitude);
  TangentOperator T = assemble_T(H, z, H.omega0, omega_next, box, H.epsilon,
                                 config.operator_config());
  OperatorSolver solver(T);
  std::vector<double> rhs = restrict_to_rows(project(F, out.N_next), *T.order);
  std::vector<double> delta = solver.solve(rhs);
  out.step_l2 = norm_l2(delta);
  out.log_inverse_norm = solver.log_inverse_norm();

  FourierVector znext(H.n);
  for (std::size_t r = 0; r < T.order->rows(); ++r) {
    double v = zhat_p.get(T.order->mode(r)) - delta[r];
    if (v != 0.0) znext.set(T.order->mode(r), v);
  }
  out.zhat_p = std::move(znext);
  return out;
}

SolverState run(const PolynomialHamiltonian& H, const SolverConfig& config) {
  config.validate();
  H.validate();
  SolverState state;
  state.config = config;
  state.theoretical_M =
      H.epsilon > 0.0 && H.epsilon < 1.0
          ? std::exp(std::pow(std::log(1.0 / H.epsilon), 1.0 / 20.0))
          : 1.0;

  FourierVector zp(H.n);
  std::vector<double> omega_r = H.omega0;
  int N_r = config.N0;
  double last_step = 0.0;

  for (int r = 0;; ++r) {
    std::vector<double> omega_next = q_update(H, zp, config.amplitude, H.epsilon);
    FourierVector F = residual_F(H, zp, H.omega0, omega_next, H.epsilon,
                                 LatticeBox{N_r, H.n}, config.amplitude,
                                 config.mode_budget);
    IterationRecord rec;
    rec.r = r;
    rec.N = N_r;
    rec.omega = omega_r;
    rec.residual_l2 = F.norm_l2();
    rec.step_l2 = last_step;
    rec.zhat = with_resonant_amplitudes(zp, H.n, config.amplitude);
    rec.support_size = rec.zhat.support_size();
    rec.gevrey_sup = gevrey_profile(rec.zhat, config.gevrey_s).sup;
    DiophantineResult dio =
        diophantine_check(omega_r, config.diophantine_box, config.tau);
    rec.diophantine_ok = dio.ok;
    rec.diophantine_margin = dio.margin;
    rec.diophantine_worst_k = dio.worst_k;
    rec.omega_next = omega_next;
    state.history.push_back(std::move(rec));

    if (state.history.back().residual_l2 <= config.tol_residual) {
      state.termination = Termination::kConverged;
      break;
    }
    if (r >= config.max_iter) {
      state.termination = Termination::kMaxIter;
      break;
    }

    try {
      if (config.strict_conditions) {
        // assemble once more for the condition check before stepping; the
        // step below reuses its own factorization
        LatticeBox next_box{next_half_width(N_r, H.n, config), H.n};
        FourierVector z = with_resonant_amplitudes(zp, H.n, config.amplitude);
        TangentOperator T = assemble_T(H, z, H.omega0, omega_next, next_box,
                                       H.epsilon, config.operator_config());
        DiagnosticsReport rep = condition_report(T, config.gevrey_s, next_box.N,
                                                 config.localization_dim_cap);
        if (rep.localization_checked && rep.localization_worst_ratio > 1.0) {
          state.termination = Termination::kConditionViolation;
          state.termination_detail =
              "localization ratio " + std::to_string(rep.localization_worst_ratio) +
              " exceeds 1 at N=" + std::to_string(next_box.N);
          break;
        }
      }
      PStepResult step = p_update(H, zp, omega_next, F, N_r, config);
      state.history.back().log_inverse_norm = step.log_inverse_norm;
      if (step.capped || (step.N_next == config.N_cap && config.M * N_r > config.N_cap))
        state.box_capped = true;
      zp = std::move(step.zhat_p);
      omega_r = omega_next;
      N_r = step.N_next;
      last_step = step.step_l2;
    } catch (const NearResonanceError& e) {
      state.termination = Termination::kNearResonance;
      state.termination_detail = e.what();  // carries the offending (j, k)
      break;
    }
  }

  const IterationRecord& last = state.history.back();
  state.omega_final = last.omega_next;
  state.zhat_final = last.zhat;
  state.final_residual = last.residual_l2;
  return state;
}

Evaluation evaluate_solution(const FourierVector& zhat,
                             const std::vector<double>& omega_drift, double t) {
  const std::size_t n = zhat.dim();
  Evaluation ev;
  ev.z.assign(n, {0.0, 0.0});
  // canonical support order fixes the summation order
  for (const auto& [m, v] : zhat.support()) {
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) phase += double(m.k[i]) * omega_drift[i];
    phase *= t;
    ev.z[std::size_t(m.j)] +=
        v * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  const double sqrt2 = std::sqrt(2.0);
  ev.x.resize(n);
  ev.y.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    ev.x[j] = -sqrt2 * ev.z[j].imag();
    ev.y[j] = sqrt2 * ev.z[j].real();
  }
  return ev;
}

}  // namespace qtorus
