#include "seqscan/experiment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "seqscan/batch.hpp"

namespace seqscan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? kNaN : s / static_cast<double>(xs.size());
}

double stderr_of(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

double rate(std::uint64_t hits, std::uint64_t trials) {
  return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
}

BatchSummary failed_row(double sweep_value, const std::string& policy, std::uint64_t episodes,
                        const std::string& what) {
  BatchSummary row;
  row.sweep_value = sweep_value;
  row.policy = policy;
  row.episodes = episodes;
  row.mean_cost = row.stderr_cost = row.fa_rate = row.md_rate = kNaN;
  row.lower_bound = row.cost_over_bound = row.rho = row.rho_stderr = kNaN;
  row.error = what.empty() ? "unknown error" : what;
  return row;
}

}  // namespace

BatchSummary summarize(std::span<const ProcessSpec> specs, std::size_t m, std::span<const EpisodeResult> batch) {
  const std::size_t k = specs.size();
  BatchSummary row;
  row.episodes = batch.size();
  row.rho = row.rho_stderr = kNaN;

  std::vector<double> costs;
  std::vector<double> bounds;
  costs.reserve(batch.size());
  bounds.reserve(batch.size());
  std::vector<std::uint64_t> fa(k, 0), md(k, 0), normal(k, 0), abnormal(k, 0);
  std::vector<double> samples(k, 0.0);

  for (const auto& ep : batch) {
    costs.push_back(ep.cost);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& p = ep.processes[i];
      (p.abnormal ? abnormal : normal)[i] += 1;
      fa[i] += p.false_alarm ? 1 : 0;
      md[i] += p.miss_detect ? 1 : 0;
      samples[i] += static_cast<double>(p.samples);
    }
    double bound = kNaN;
    try {
      const auto terms = bound_terms(specs, ep.processes);
      bound = lower_bound_oracle(terms, m);
    } catch (const std::invalid_argument&) {
      // Zero divergence somewhere: no bound for this realisation.
    }
    bounds.push_back(bound);
  }

  row.mean_cost = mean_of(costs);
  row.stderr_cost = stderr_of(costs, row.mean_cost);
  std::uint64_t fa_total = 0, md_total = 0, normal_total = 0, abnormal_total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    row.fa_by_process.push_back(rate(fa[i], normal[i]));
    row.md_by_process.push_back(rate(md[i], abnormal[i]));
    row.mean_samples.push_back(batch.empty() ? kNaN : samples[i] / static_cast<double>(batch.size()));
    fa_total += fa[i];
    md_total += md[i];
    normal_total += normal[i];
    abnormal_total += abnormal[i];
  }
  row.fa_rate = rate(fa_total, normal_total);
  row.md_rate = rate(md_total, abnormal_total);
  row.lower_bound = mean_of(bounds);  // NaN propagates when any episode lacks a bound
  row.cost_over_bound = row.lower_bound > 0.0 ? row.mean_cost / row.lower_bound : kNaN;
  return row;
}

Ratio paired_cost_ratio(std::span<const EpisodeResult> batch, std::span<const EpisodeResult> reference) {
  if (batch.empty() || batch.size() != reference.size()) return {kNaN, kNaN};
  const double n = static_cast<double>(batch.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sx += batch[i].cost;
    sy += reference[i].cost;
  }
  const double mx = sx / n;
  const double my = sy / n;
  if (my == 0.0) return {kNaN, kNaN};
  const double r = mx / my;
  // Linearised residuals x - r*y, paired per episode.
  double ss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double e = batch[i].cost - r * reference[i].cost;
    ss += e * e;
  }
  const double se = batch.size() < 2 ? 0.0 : std::sqrt(ss / (n - 1.0) / n) / my;
  return {r, se};
}

ExperimentOutput run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
  validate_config(config);
  ExperimentOutput out;
  if (config.episodes == 0) return out;

  const BatchRange range{config.master_seed, 0, config.episodes};
  for (double point : sweep_points(config)) {
    std::vector<ProcessSpec> specs;
    try {
      specs = specs_at(config, point);
    } catch (const std::exception& e) {
      for (const auto& entry : config.policies) out.rows.push_back(failed_row(point, entry.name, 0, e.what()));
      continue;
    }

    std::vector<std::vector<EpisodeResult>> batches(config.policies.size());
    const std::size_t first_row = out.rows.size();
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
      const auto& entry = config.policies[p];
      try {
        const auto policy = policy_config(config, entry, point);
        batches[p] = options.parallel ? run_batch_parallel(specs, policy, range) : run_batch_serial(specs, policy, range);
        BatchSummary row = summarize(specs, config.m, batches[p]);
        row.sweep_value = point;
        row.policy = entry.name;
        if (config.sweep && config.sweep->variable == SweepVariable::CostOfError) {
          row.risk = bayes_risk(batches[p], point);
        }
        out.rows.push_back(std::move(row));
      } catch (const std::exception& e) {
        batches[p].clear();
        out.rows.push_back(failed_row(point, entry.name, config.episodes, e.what()));
      }
    }

    if (config.rho_reference) {
      std::size_t ref = 0;
      while (config.policies[ref].name != *config.rho_reference) ++ref;
      for (std::size_t p = 0; p < config.policies.size(); ++p) {
        auto& row = out.rows[first_row + p];
        if (!row.error.empty()) continue;
        const Ratio r = paired_cost_ratio(batches[p], batches[ref]);
        row.rho = r.value;
        row.rho_stderr = r.stderr_;
      }
    }

    if (options.keep_episodes) {
      for (std::size_t p = 0; p < config.policies.size(); ++p) {
        for (std::size_t i = 0; i < batches[p].size(); ++i) {
          out.episodes.push_back({point, config.policies[p].name, i, std::move(batches[p][i])});
        }
      }
    }
  }
  return out;
}

}  // namespace seqscan
