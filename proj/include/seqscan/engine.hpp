#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "seqscan/composite.hpp"
#include "seqscan/obs_model.hpp"
#include "seqscan/policy.hpp"
#include "seqscan/random.hpp"
#include "seqscan/sprt.hpp"

namespace seqscan {

struct KnownModels {
  ObservationModel h0;
  ObservationModel h1;
};

struct GridModels {
  std::shared_ptr<const ParameterGrid> grid;
};

struct ProcessSpec {
  double prior = 0.5;
  double cost_rate = 1.0;
  std::variant<KnownModels, GridModels> models = GridModels{};
  double alpha = 1e-2;
  double beta = 1e-2;
  std::int64_t switch_delay = 0;
  // Pins the state for analysis runs (0 normal, 1 abnormal). The truth draw
  // is still consumed so random streams stay aligned.
  std::optional<int> forced_truth;
};

enum class PolicyKind { ClosedLoop, OpenLoop };

struct PolicyConfig {
  PolicyKind kind = PolicyKind::ClosedLoop;
  std::size_t m = 1;
  double zeta = 1.7;  // kNoExploration disables round-robin instants
  CompositeStatistic statistic = CompositeStatistic::GLR;
};

inline constexpr std::int64_t kEpisodeTimeCap = 10'000'000;

class EpisodeCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument naming the first offending process.
void validate_specs(std::span<const ProcessSpec> specs, const PolicyConfig& policy);

struct ProcessOutcome {
  bool abnormal = false;
  std::size_t truth_point = 0;  // grid index of the true parameter (grid models only)
  int declaration = -1;         // 0 normal, 1 abnormal, -1 undeclared
  std::int64_t stop_time = 0;
  std::int64_t samples = 0;
  bool false_alarm = false;
  bool miss_detect = false;

  bool operator==(const ProcessOutcome&) const = default;
};

struct EpisodeResult {
  std::vector<ProcessOutcome> processes;
  double cost = 0.0;
  std::int64_t final_time = 0;
  std::int64_t steps = 0;
  std::int64_t total_delay = 0;
  std::int64_t idle_slots = 0;

  bool operator==(const EpisodeResult&) const = default;
};

struct BoundTerm {
  double cost;
  double boundary;
  double divergence;     // D(f1 || f0) at the true parameter
  double expected_size;  // E*(N | H1), used only for ordering
};

struct TraceStep {
  std::int64_t n = 0;
  std::int64_t clock = 0;
  bool exploration = false;
  std::vector<ProcessId> selected;
  std::vector<Observation> observations;
  std::vector<double> sum_statistic;  // per selected process, after the update
  std::vector<double> indices;        // all processes, after the update
};

struct EpisodeTrace {
  std::vector<TraceStep> steps;
};

/// Runs one episode. Truths are drawn first (one uniform per process, plus a
/// second for grid processes), then one observation per selected process per
/// step in selection order.
EpisodeResult run_episode(std::span<const ProcessSpec> specs, const PolicyConfig& policy, RandomStream& rng,
                          EpisodeTrace* trace = nullptr);

/// Lower-bound terms only need the truth flags; an EpisodeResult works too.
std::vector<BoundTerm> bound_terms(std::span<const ProcessSpec> specs, std::span<const ProcessOutcome> truth);

/// Truth realisation: the first random draws of every episode.
std::vector<ProcessOutcome> draw_truths(std::span<const ProcessSpec> specs, RandomStream& rng);

/// Sum of switch delays of processes entering the probed set. The first step
/// (empty previous set) is free.
std::int64_t apply_switching_delay(std::span<const ProcessId> previous, std::span<const ProcessId> next,
                                   std::span<const ProcessSpec> specs, bool first_step);

/// A priori expected detection time used to order OL-piCN.
double a_priori_expected_size(const ProcessSpec& spec);

/// Sum over truth-abnormal processes declared abnormal of c_k tau_k.
double episode_cost(std::span<const ProcessSpec> specs, const EpisodeResult& result);


/// Asymptotic lower bound on the expected cost for one truth realisation.
/// Terms are ordered by decreasing cost / expected_size. For M > 1
/// the striped double sum is returned when all costs are equal and NaN
/// otherwise. Throws std::invalid_argument for a zero divergence.
double lower_bound_oracle(std::span<const BoundTerm> abnormal, std::size_t m = 1);

/// Whether every process carries the same cost rate.
bool equal_costs(std::span<const ProcessSpec> specs);

struct BayesRisk {
  double mean;
  double stderr_;
  double fa_rate;
  double md_rate;
};

/// Normalised Bayes risk sum_{k in H1} [tau_k / c_e + P_FA_k + P_MD_k], with
/// per-process empirical error rates of the batch substituted for the
/// probabilities. The standard error is taken over per-episode terms.
BayesRisk bayes_risk(std::span<const EpisodeResult> batch, double c_e);

}  // namespace seqscan
