#pragma once

#include <string>
#include <vector>

#include "qtorus/config.hpp"

namespace qtorus {

/// Built-in experiment names in listing order.
std::vector<std::string> preset_names();

/// One line per preset: name and a short description.
std::string list_presets();

/// Throws ConfigError for unknown names.
ExperimentConfig preset_config(const std::string& name);

}  // namespace qtorus
