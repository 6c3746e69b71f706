#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqscan/config.hpp"
#include "seqscan/engine.hpp"

namespace seqscan {

/// One (sweep point, policy) batch.
struct BatchSummary {
  double sweep_value = 0.0;  // NaN without a sweep
  std::string policy;
  std::uint64_t episodes = 0;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
  double fa_rate = 0.0;  // false alarms / truth-normal process draws
  double md_rate = 0.0;  // misses / truth-abnormal process draws
  std::vector<double> fa_by_process;
  std::vector<double> md_by_process;
  std::vector<double> mean_samples;  // per process
  double lower_bound = 0.0;          // mean per-episode oracle; NaN when unavailable
  double cost_over_bound = 0.0;
  double rho = 0.0;  // mean_cost / reference mean_cost at the same sweep point
  double rho_stderr = 0.0;
  std::optional<BayesRisk> risk;  // c_e sweeps only
  std::string error;              // non-empty when the batch failed
};

struct EpisodeRecord {
  double sweep_value = 0.0;
  std::string policy;
  std::uint64_t episode = 0;
  EpisodeResult result;
};

struct ExperimentOptions {
  bool parallel = true;
  bool keep_episodes = false;
};

struct ExperimentOutput {
  std::vector<BatchSummary> rows;
  std::vector<EpisodeRecord> episodes;  // filled when keep_episodes
};

/// Runs every sweep point for every policy. Episode i of every batch uses
/// RandomStream(master_seed, i), so policies see the same truth draws. A batch
/// that throws is reported with `error` set and does not stop the others.
ExperimentOutput run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

/// Aggregates one batch; rho fields are left at NaN.
BatchSummary summarize(std::span<const ProcessSpec> specs, std::size_t m, std::span<const EpisodeResult> batch);

struct Ratio {
  double value;
  double stderr_;
};

/// Ratio of mean costs over paired episodes with a delta-method standard
/// error. NaN when the reference mean is zero or there are no episodes.
Ratio paired_cost_ratio(std::span<const EpisodeResult> batch, std::span<const EpisodeResult> reference);

}  // namespace seqscan
