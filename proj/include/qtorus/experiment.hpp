#pragma once

#include <filesystem>
#include <optional>

#include "qtorus/config.hpp"

namespace qtorus {

inline constexpr const char* kVersion = "qtorus 0.1.0";

/// Command-line overrides applied on top of a parsed config.
struct Overrides {
  std::optional<double> epsilon;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<bool> strict_conditions;
  std::optional<std::string> out_dir;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

struct RunSummary {
  int exit_code = 0;  // 0 completed, 1 config error, 2 near-resonance abort
  std::string termination;
  std::string detail;  // names the offending divisor mode on aborts
  std::filesystem::path out_dir;
};

/// Runs one experiment and writes its artifacts (history.csv, per-iteration
/// spectra, trajectory.csv when enabled, summary.json; drift.csv or
/// resonance.csv for the table modes). Files are written atomically.
RunSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace qtorus
