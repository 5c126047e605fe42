#include "qtorus/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "qtorus/baselines.hpp"
#include "qtorus/solver.hpp"

namespace qtorus {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string history_csv(const SolverState& state, std::size_t n) {
  std::string s = "r,N_r";
  for (std::size_t j = 1; j <= n; ++j) s += ",omega_" + std::to_string(j);
  s += ",residual_l2,step_l2,support_size,log_inverse_norm,gevrey_sup\n";
  for (const IterationRecord& rec : state.history) {
    s += std::to_string(rec.r) + "," + std::to_string(rec.N);
    for (double w : rec.omega) s += "," + fmt(w);
    s += "," + fmt(rec.residual_l2) + "," + fmt(rec.step_l2) + "," +
         std::to_string(rec.support_size) + "," + fmt(rec.log_inverse_norm) +
         "," + fmt(rec.gevrey_sup) + "\n";
  }
  return s;
}

std::string spectrum_csv(const FourierVector& zhat) {
  const std::size_t n = zhat.dim();
  std::string s = "j";
  for (std::size_t i = 1; i <= n; ++i) s += ",k_" + std::to_string(i);
  s += ",value\n";
  for (const auto& [m, v] : zhat.support()) {
    s += std::to_string(m.j + 1);
    for (std::size_t i = 0; i < n; ++i) s += "," + std::to_string(m.k[i]);
    s += "," + fmt(v) + "\n";
  }
  return s;
}

std::string trajectory_csv(const PolynomialHamiltonian& H,
                           const SolverState& state,
                           const std::vector<double>& times, double ref_dt) {
  const std::size_t n = H.n;
  Evaluation start = evaluate_solution(state.zhat_final, state.omega_final, 0.0);
  PhaseState init{start.x, start.y, 0.0};
  std::vector<PhaseState> ref = reference_trajectory(H, init, times, ref_dt);

  std::string s = "t";
  for (std::size_t j = 1; j <= n; ++j) s += ",x_" + std::to_string(j);
  for (std::size_t j = 1; j <= n; ++j) s += ",y_" + std::to_string(j);
  for (std::size_t j = 1; j <= n; ++j) s += ",ref_x_" + std::to_string(j);
  for (std::size_t j = 1; j <= n; ++j) s += ",ref_y_" + std::to_string(j);
  s += ",pointwise_error\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    Evaluation ev = evaluate_solution(state.zhat_final, state.omega_final, times[i]);
    double err2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double dx = ev.x[j] - ref[i].x[j];
      double dy = ev.y[j] - ref[i].y[j];
      err2 += dx * dx + dy * dy;
    }
    s += fmt(times[i]);
    for (double v : ev.x) s += "," + fmt(v);
    for (double v : ev.y) s += "," + fmt(v);
    for (double v : ref[i].x) s += "," + fmt(v);
    for (double v : ref[i].y) s += "," + fmt(v);
    s += "," + fmt(std::sqrt(err2)) + "\n";
  }
  return s;
}

nlohmann::json iterations_json(const SolverState& state) {
  nlohmann::json arr = nlohmann::json::array();
  for (const IterationRecord& rec : state.history) {
    nlohmann::json row = {{"r", rec.r},
                          {"N", rec.N},
                          {"omega", rec.omega},
                          {"residual_l2", rec.residual_l2},
                          {"step_l2", rec.step_l2},
                          {"support_size", rec.support_size},
                          {"gevrey_sup", rec.gevrey_sup},
                          {"diophantine_ok", rec.diophantine_ok},
                          {"diophantine_margin", rec.diophantine_margin},
                          {"diophantine_worst_k", rec.diophantine_worst_k.entries()}};
    if (std::isfinite(rec.log_inverse_norm))
      row["log_inverse_norm"] = rec.log_inverse_norm;
    arr.push_back(std::move(row));
  }
  return arr;
}

RunSummary run_solve(const ExperimentConfig& cfg, const fs::path& dir) {
  auto t0 = std::chrono::steady_clock::now();
  SolverState state = run(cfg.system, cfg.solver);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  atomic_write(dir / "history.csv", history_csv(state, cfg.system.n));
  for (const IterationRecord& rec : state.history)
    atomic_write(dir / ("spectrum_r" + std::to_string(rec.r) + ".csv"),
                 spectrum_csv(rec.zhat));

  bool aborted = state.termination == Termination::kNearResonance ||
                 state.termination == Termination::kConditionViolation;
  if (cfg.outputs.emit_trajectories && !aborted) {
    std::vector<double> times = cfg.outputs.trajectory_times;
    if (times.empty())
      for (int i = 0; i <= 20; ++i) times.push_back(0.5 * double(i));
    atomic_write(dir / "trajectory.csv",
                 trajectory_csv(cfg.system, state, times, cfg.outputs.reference_dt));
  }

  nlohmann::json summary = {
      {"version", kVersion},
      {"name", cfg.name},
      {"config", config_to_json(cfg)},
      {"termination", to_string(state.termination)},
      {"termination_detail", state.termination_detail},
      {"final_omega", state.omega_final},
      {"final_residual", state.final_residual},
      {"theoretical_M", state.theoretical_M},
      {"box_capped", state.box_capped},
      {"iterations", iterations_json(state)},
      {"wall_clock_seconds", wall}};
  atomic_write(dir / "summary.json", summary.dump(2) + "\n");

  RunSummary out;
  out.termination = to_string(state.termination);
  out.detail = state.termination_detail;
  out.out_dir = dir;
  out.exit_code = aborted ? 2 : 0;
  return out;
}

RunSummary run_drift(const ExperimentConfig& cfg, const fs::path& dir) {
  auto t0 = std::chrono::steady_clock::now();
  std::string s = "h,theta_h,delta_theta,n,accumulated\n";
  for (double h : cfg.drift.h_values) {
    DriftRecord rec = phase_drift(h, cfg.drift.n_steps);
    s += fmt(rec.h) + "," + fmt(rec.theta_h) + "," + fmt(rec.delta_theta) + "," +
         std::to_string(rec.n_steps) + "," + fmt(rec.accumulated) + "\n";
  }
  atomic_write(dir / "drift.csv", s);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json summary = {{"version", kVersion},
                            {"name", cfg.name},
                            {"config", config_to_json(cfg)},
                            {"termination", "completed"},
                            {"wall_clock_seconds", wall}};
  atomic_write(dir / "summary.json", summary.dump(2) + "\n");
  return RunSummary{0, "completed", "", dir};
}

RunSummary run_scan(const ExperimentConfig& cfg, const fs::path& dir) {
  auto t0 = std::chrono::steady_clock::now();
  std::string s = "tau,M_box,samples,fraction,seed\n";
  for (double tau : cfg.scan.taus) {
    double fraction = resonant_measure_mc(cfg.scan.domain, cfg.scan.M_box, tau,
                                          cfg.scan.samples, cfg.scan.seed);
    s += fmt(tau) + "," + std::to_string(cfg.scan.M_box) + "," +
         std::to_string(cfg.scan.samples) + "," + fmt(fraction) + "," +
         std::to_string(cfg.scan.seed) + "\n";
  }
  atomic_write(dir / "resonance.csv", s);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json summary = {{"version", kVersion},
                            {"name", cfg.name},
                            {"config", config_to_json(cfg)},
                            {"termination", "completed"},
                            {"wall_clock_seconds", wall}};
  atomic_write(dir / "summary.json", summary.dump(2) + "\n");
  return RunSummary{0, "completed", "", dir};
}

}  // namespace

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.epsilon) cfg.system.epsilon = *o.epsilon;
  if (o.max_iter) cfg.solver.max_iter = *o.max_iter;
  if (o.seed) {
    cfg.solver.seed = *o.seed;
    cfg.scan.seed = *o.seed;
  }
  if (o.strict_conditions) cfg.solver.strict_conditions = *o.strict_conditions;
  if (o.out_dir) cfg.outputs.directory = *o.out_dir;
  cfg.validate();
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::path dir(cfg.outputs.directory);
  fs::create_directories(dir);
  switch (cfg.mode) {
    case ExperimentMode::kDrift: return run_drift(cfg, dir);
    case ExperimentMode::kResonanceScan: return run_scan(cfg, dir);
    case ExperimentMode::kSolve: break;
  }
  return run_solve(cfg, dir);
}

}  // namespace qtorus
