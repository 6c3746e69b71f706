// seqscan command line: run, validate, figures, bound.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "seqscan/batch.hpp"
#include "seqscan/config.hpp"
#include "seqscan/csv.hpp"
#include "seqscan/experiment.hpp"
#include "seqscan/recipes.hpp"

namespace {

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> episodes;
  std::string out;
  std::string per_episode;
  bool serial = false;
};

void apply_overrides(seqscan::ExperimentConfig& config, const RunFlags& flags) {
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.episodes) config.episodes = *flags.episodes;
}

void execute(const seqscan::ExperimentConfig& config, const RunFlags& flags, bool risk_table) {
  seqscan::ExperimentOptions options;
  options.parallel = !flags.serial;
  options.keep_episodes = !flags.per_episode.empty();
  const auto result = seqscan::run_experiment(config, options);

  auto write = [&](std::ostream& o) {
    if (risk_table) {
      seqscan::write_risk_csv(o, result.rows);
    } else {
      seqscan::write_summary_csv(o, result.rows);
    }
  };
  if (flags.out.empty() || flags.out == "-") {
    write(std::cout);
  } else if (risk_table) {
    seqscan::emit_risk_csv(result.rows, flags.out);
  } else {
    seqscan::emit_csv(result.rows, flags.out);
  }
  if (options.keep_episodes) seqscan::emit_episode_csv(result.episodes, flags.per_episode);

  for (const auto& row : result.rows) {
    if (!row.error.empty()) {
      std::cerr << "seqscan: warning: batch " << row.policy << " at " << seqscan::format_number(row.sweep_value)
                << " failed: " << row.error << "\n";
    }
  }
}

// Exact bound when every truth is pinned; otherwise the mean over the
// episode truth draws the run itself would use.
double bound_at(const seqscan::ExperimentConfig& config, double point) {
  const auto specs = seqscan::specs_at(config, point);
  bool pinned = true;
  for (const auto& s : specs) pinned = pinned && s.forced_truth.has_value();
  const std::uint64_t draws = pinned ? 1 : std::max<std::uint64_t>(config.episodes, 1);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    seqscan::RandomStream rng(config.master_seed, i);
    const auto truths = seqscan::draw_truths(specs, rng);
    sum += seqscan::lower_bound_oracle(seqscan::bound_terms(specs, truths), config.m);
  }
  return sum / static_cast<double>(draws);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential anomaly search: probing policies, Monte Carlo batches, CSV output"};
  app.require_subcommand(1);

  RunFlags flags;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)")->envname("SEQSCAN_SEED");
    cmd->add_option("--episodes", flags.episodes, "Episodes per batch (overrides the config)");
    cmd->add_option("--out", flags.out, "Output CSV path (default: stdout)");
    cmd->add_option("--per-episode", flags.per_episode, "Also write per-episode records to this CSV");
    cmd->add_flag("--serial", flags.serial, "Use the serial reference kernel");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
  add_run_flags(run);

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);

  std::string figure;
  double scale = 1.0;
  auto* figures = app.add_subcommand("figures", "Run a bundled numerical study");
  figures->add_option("figure", figure, "fig1 | fig2 | fig3 | fig4 | fig5")
      ->required()
      ->check(CLI::IsMember(seqscan::figure_names()));
  figures->add_option("--scale", scale, "Divide K and the episode count by this factor")->check(CLI::Range(1.0, 1e6));
  add_run_flags(figures);

  auto* bound = app.add_subcommand("bound", "Print the asymptotic lower bound on the expected cost");
  bound->add_option("config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
  bound->add_option("--seed", flags.seed, "Master seed for truth draws")->envname("SEQSCAN_SEED");
  bound->add_option("--episodes", flags.episodes, "Truth draws to average when truths are not pinned");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      auto config = seqscan::load_config(config_path);
      apply_overrides(config, flags);
      execute(config, flags, config.sweep && config.sweep->variable == seqscan::SweepVariable::CostOfError);
    } else if (validate->parsed()) {
      const auto config = seqscan::load_config(config_path);
      seqscan::validate_config(config);
      std::cout << "ok: " << config.name << "\n";
    } else if (figures->parsed()) {
      auto config = seqscan::figure_recipe(figure, scale);
      apply_overrides(config, flags);
      execute(config, flags, seqscan::is_risk_recipe(figure));
    } else if (bound->parsed()) {
      auto config = seqscan::load_config(config_path);
      apply_overrides(config, flags);
      seqscan::validate_config(config);
      for (double point : seqscan::sweep_points(config)) {
        const std::string value = seqscan::format_number(bound_at(config, point));
        if (config.sweep) {
          std::cout << seqscan::to_string(config.sweep->variable) << "=" << seqscan::format_number(point) << " "
                    << (value.empty() ? "unavailable" : value) << "\n";
        } else {
          std::cout << (value.empty() ? "unavailable" : value) << "\n";
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "seqscan: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
