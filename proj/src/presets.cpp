#include "qtorus/presets.hpp"

#include <cmath>

namespace qtorus {

namespace {

Monomial mono(double c, std::vector<int> alpha, std::vector<int> beta) {
  return Monomial{c, MultiIndex(std::move(alpha)), MultiIndex(std::move(beta))};
}

// H1 = (1/16)(z + zbar)^4 expanded over the stored-once convention:
// (4,0) covers z^4 + zbar^4, (3,1) covers z^3 zbar + z zbar^3, and the
// self-paired (2,2) carries the full 6/16.
ExperimentConfig duffing() {
  ExperimentConfig cfg;
  cfg.name = "duffing";
  cfg.system.n = 1;
  cfg.system.omega0 = {1.0};
  cfg.system.epsilon = 1.0;
  cfg.system.terms = {mono(1.0 / 16.0, {4}, {0}), mono(4.0 / 16.0, {3}, {1}),
                      mono(6.0 / 16.0, {2}, {2})};
  cfg.solver.M = 2;
  cfg.solver.N0 = 1;
  cfg.solver.max_iter = 5;
  cfg.solver.tol_residual = 1e-13;
  cfg.outputs.directory = "out/duffing";
  cfg.outputs.emit_trajectories = true;
  for (int i = 0; i <= 40; ++i)
    cfg.outputs.trajectory_times.push_back(0.25 * double(i));
  cfg.outputs.reference_dt = 1e-3;
  return cfg;
}

// H1 = (z1+zbar1)^2 (z2+zbar2) / (2 sqrt 2) - (z2+zbar2)^3 / (6 sqrt 2),
// the complex form of eps (y1^2 y2 - y2^3 / 3). The frequency pair
// (1, golden ratio) stands in for the excluded resonant (1, 1).
ExperimentConfig henon_heiles() {
  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  const double d = -1.0 / (6.0 * std::sqrt(2.0));
  ExperimentConfig cfg;
  cfg.name = "henon-heiles";
  cfg.system.n = 2;
  cfg.system.omega0 = {1.0, 0.5 * (1.0 + std::sqrt(5.0))};
  cfg.system.epsilon = 0.1;
  cfg.system.terms = {mono(c, {2, 1}, {0, 0}), mono(c, {2, 0}, {0, 1}),
                      mono(2.0 * c, {1, 1}, {1, 0}), mono(d, {0, 3}, {0, 0}),
                      mono(3.0 * d, {0, 2}, {0, 1})};
  cfg.solver.M = 2;
  cfg.solver.N0 = 1;
  cfg.solver.max_iter = 5;
  cfg.solver.tol_residual = 1e-13;
  cfg.outputs.directory = "out/henon-heiles";
  cfg.outputs.emit_trajectories = true;
  for (int i = 0; i <= 40; ++i)
    cfg.outputs.trajectory_times.push_back(0.25 * double(i));
  cfg.outputs.reference_dt = 1e-3;
  return cfg;
}

ExperimentConfig harmonic_drift() {
  ExperimentConfig cfg;
  cfg.name = "harmonic-drift";
  cfg.mode = ExperimentMode::kDrift;
  cfg.drift.h_values = {0.05, 0.1, 0.5, 1.0};
  cfg.drift.n_steps = 101;
  cfg.outputs.directory = "out/harmonic-drift";
  return cfg;
}

ExperimentConfig resonance_scan() {
  ExperimentConfig cfg;
  cfg.name = "resonance-scan";
  cfg.mode = ExperimentMode::kResonanceScan;
  cfg.scan.domain.lower = {1.0, 1.0};
  cfg.scan.domain.upper = {2.0, 2.0};
  cfg.scan.taus = {1.5, 2.0, 3.0, 4.0};
  cfg.scan.M_box = 10;
  cfg.scan.samples = 20000;
  cfg.scan.seed = 7;
  cfg.outputs.directory = "out/resonance-scan";
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"duffing", "henon-heiles", "harmonic-drift", "resonance-scan"};
}

std::string list_presets() {
  return
      "duffing          quartic oscillator, eps=1: residual decay, spectra, t=10 trajectory\n"
      "henon-heiles     two-frequency cubic coupling, eps=0.1, golden-ratio frequency pair\n"
      "harmonic-drift   symplectic-Euler rotation angle and accumulated phase drift table\n"
      "resonance-scan   Monte Carlo measure of the nearly-resonant frequency set\n";
}

ExperimentConfig preset_config(const std::string& name) {
  if (name == "duffing") return duffing();
  if (name == "henon-heiles") return henon_heiles();
  if (name == "harmonic-drift") return harmonic_drift();
  if (name == "resonance-scan") return resonance_scan();
  throw ConfigError("unknown preset '" + name + "' (see `qtorus list`)");
}

}  // namespace qtorus
