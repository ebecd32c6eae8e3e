#pragma once

#include "loocv/experiment.hpp"

#include <string>
#include <vector>

namespace loocv {

// Flat `key = value` config text (UTF-8, `#` comments, lists
// comma-separated). Unknown keys are errors. See README for the key set.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_text(const ExperimentConfig& cfg);

// Built-in experiment presets:
//   kde-sine       uniform x, kde h = 1/10, identity_abs loss
//   ols-gaussian   gaussian x, slope 5, ols_simple, absolute loss
//   nw-stabilized  gaussian x, sine response, nw h = 1/100, delta = 0.01
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace loocv
