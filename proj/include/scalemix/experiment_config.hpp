#pragma once

#include <filesystem>
#include <string>

#include "scalemix/sim_harness.hpp"

namespace scalemix {

/// JSON keys mirror the ExperimentConfig field names; nested objects mirror
/// JointFitConfig, NpmleConfig and IterTruncConfig. The prior is an object
/// with a "kind" tag (subset_of_signals, point_mixture, equal_variance,
/// quadratic_variance) plus that variant's fields. Missing keys keep their
/// defaults; unknown keys are rejected.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Every field, defaults included; parse_experiment_config inverts it.
std::string experiment_config_to_json(const ExperimentConfig& config, int indent = 2);

}  // namespace scalemix
