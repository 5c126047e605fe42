#pragma once

#include <vector>

#include "qtorus/hamiltonian.hpp"

namespace qtorus {

/// Canonical coordinates (x, y) at a time t.
struct PhaseState {
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.0;
};

/// Per-step and accumulated phase error of the first-order symplectic
/// integrator on the harmonic oscillator.
struct DriftRecord {
  double h = 0.0;
  double theta_h = 0.0;      // numerical rotation per step
  double delta_theta = 0.0;  // theta_h - h
  long n_steps = 0;
  double accumulated = 0.0;  // n * delta_theta
};

class StepSizeError : public std::runtime_error {
 public:
  explicit StepSizeError(const std::string& what) : std::runtime_error(what) {}
};

/// Real-form partials (dH/dx_j, dH/dy_j) through the complex gradient at
/// z = (y - ix)/sqrt(2).
void hamiltonian_partials(const PolynomialHamiltonian& H,
                          const std::vector<double>& x,
                          const std::vector<double>& y,
                          std::vector<double>& dH_dx,
                          std::vector<double>& dH_dy);

/// Forward-backward Euler for the 1-d harmonic oscillator:
/// x' = x - h y, y' = y + h x'.
void harmonic_euler_step(double& x, double& y, double h);

/// Forward-backward Euler for a general Hamiltonian, x first:
/// x' = x - h dH/dy(x', y), y' = y + h dH/dx(x', y). The x-update is solved
/// by fixed-point iteration; it is explicit whenever dH/dy has no x
/// dependence, which covers the harmonic map and both experiment systems.
PhaseState symplectic_euler_step(const PolynomialHamiltonian& H,
                                 const PhaseState& state, double h);

/// theta_h = arccos(1 - h^2/2) for h in [0, 2).
double phase_per_step(double h);

/// DriftRecord with accumulated = n * (theta_h - h).
DriftRecord phase_drift(double h, long n_steps);

/// Accumulated rotation angle of the harmonic symplectic-Euler orbit from
/// (1,0), minus n*h. The angle is unwrapped step by step in the frame that
/// turns the invariant ellipse x^2 + y^2 - h x y into a circle, where the
/// one-step map is an exact rotation by theta_h. Cross-validates phase_drift.
double measured_angle_drift(double h, long n_steps);

/// Classical fixed-step 4th-order integration of Hamilton's equations
/// x' = -dH/dy, y' = dH/dx, with the step halved until the endpoint moves
/// less than 1e-10 (at most 12 halvings, then StepSizeError).
PhaseState reference_integrate(const PolynomialHamiltonian& H,
                               const PhaseState& initial, double t_end,
                               double dt);

/// Same certification applied to a whole sample path.
std::vector<PhaseState> reference_trajectory(const PolynomialHamiltonian& H,
                                             const PhaseState& initial,
                                             const std::vector<double>& times,
                                             double dt);

}  // namespace qtorus
