#pragma once

#include <string>
#include <vector>

#include "seqscan/config.hpp"

namespace seqscan {

/// Names accepted by figure_recipe, in order.
std::vector<std::string> figure_names();

/// Bundled numerical study. `scale` >= 1 divides K (rounded, kept feasible
/// for the recipe) and the episode count. Throws ConfigError for an unknown
/// name or scale < 1.
ExperimentConfig figure_recipe(const std::string& name, double scale = 1.0);

/// Whether the recipe's CSV is the Bayes-risk table.
bool is_risk_recipe(const std::string& name);

}  // namespace seqscan
