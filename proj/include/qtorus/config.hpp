#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "qtorus/diagnostics.hpp"
#include "qtorus/solver.hpp"

#include <json.hpp>

namespace qtorus {

/// Config problems carry the offending key in the message.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentMode { kSolve, kDrift, kResonanceScan };

struct DriftSettings {
  std::vector<double> h_values{0.05, 0.1, 0.5, 1.0};
  long n_steps = 101;
};

struct ResonanceScanSettings {
  FrequencyDomain domain;
  std::vector<double> taus{1.5, 2.0, 3.0, 4.0};
  int M_box = 10;
  std::size_t samples = 20000;
  std::uint64_t seed = 7;
};

struct OutputSettings {
  std::string directory;
  bool emit_trajectories = false;
  std::vector<double> trajectory_times;  // empty = 0..10 step 0.5
  double reference_dt = 1e-3;
};

/// Everything one run needs; parsed from the flat key = value format or the
/// JSON echo embedded in summary.json.
struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentMode mode = ExperimentMode::kSolve;
  PolynomialHamiltonian system;  // omega0, monomials, epsilon
  SolverConfig solver;
  DriftSettings drift;
  ResonanceScanSettings scan;
  OutputSettings outputs;

  void validate() const;
};

/// Parses a config file; JSON is detected by a leading '{' (a summary.json
/// is accepted and unwrapped through its "config" member).
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace qtorus
