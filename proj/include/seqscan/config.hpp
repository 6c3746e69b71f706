#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqscan/engine.hpp"

namespace seqscan {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StatisticKind { SPRT, GLR, ALR };

enum class SweepVariable { K, D2, CostOfError, Alpha };

struct PolicyEntry {
  std::string name;
  PolicyKind kind = PolicyKind::ClosedLoop;
  std::optional<double> zeta;  // falls back to the experiment zeta
};

enum class GeneratorType { CompositeMixture, TwoLevel, Homogeneous, ExplorationPair };

/// Process-list generators for the numerical studies.
///
///   composite_mixture  theta0 equally spaced in [theta0_min, theta0_max];
///                      Theta1 = {dev * theta0} with deviation_weights; grid models.
///   two_level          theta0 = theta0_low for the first half, theta0_high for
///                      the rest; theta1 = deviation * theta0; delays d1 / d2.
///   homogeneous        K identical Poisson(theta0) vs Poisson(theta1) processes.
///   exploration_pair   two processes Poisson(theta0) vs Poisson(theta1_pair[k]);
///                      process 2's error budget is solved so that its initial
///                      index is 1/index_ratio of process 1's.
struct GeneratorSpec {
  GeneratorType type = GeneratorType::Homogeneous;
  std::size_t k = 10;
  double prior = 0.5;
  double alpha = 1e-3;
  double beta = 1e-6;
  // Cost is theta0 when cost_is_theta0, else `cost`.
  bool cost_is_theta0 = true;
  double cost = 1.0;

  double theta0_min = 10.0;
  double theta0_max = 20.0;
  std::vector<double> deviations{1.2, 1.5};
  std::vector<double> deviation_weights{0.5, 0.5};

  double theta0_low = 10.0;
  double theta0_high = 20.0;
  double deviation = 1.5;
  std::int64_t d1 = 0;
  std::int64_t d2 = 0;

  double theta0 = 10.0;
  double theta1 = 15.0;

  std::vector<double> theta1_pair{10.1, 10.3};
  std::vector<double> priors_pair{0.9, 0.1};
  double index_ratio = 2.0;
};

struct SweepSpec {
  SweepVariable variable = SweepVariable::K;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t episodes = 10000;
  std::uint64_t master_seed = 1;
  std::size_t m = 1;
  double zeta = 1.7;
  StatisticKind statistic = StatisticKind::SPRT;
  std::vector<PolicyEntry> policies;
  std::optional<std::string> rho_reference;
  std::vector<ProcessSpec> processes;
  std::optional<GeneratorSpec> generator;
  std::optional<SweepSpec> sweep;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

/// Checks every sweep point before anything runs. Throws ConfigError with a
/// message naming the offending process or field.
void validate_config(const ExperimentConfig& config);

/// Sweep points to run; a single NaN when there is no sweep.
std::vector<double> sweep_points(const ExperimentConfig& config);

/// Process list at one sweep point (NaN = no sweep).
std::vector<ProcessSpec> specs_at(const ExperimentConfig& config, double sweep_value);

PolicyConfig policy_config(const ExperimentConfig& config, const PolicyEntry& entry, double sweep_value);

std::string to_string(SweepVariable v);
std::string to_string(StatisticKind s);

/// Error budget of process 2 in the exploration pair such that
/// gamma_1(1) = index_ratio * gamma_2(1). Throws ConfigError when no budget
/// in (0, 0.5) achieves it.
double solve_pair_error(const GeneratorSpec& gen, double error_1);

}  // namespace seqscan
