#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "seqscan/config.hpp"
#include "seqscan/csv.hpp"
#include "seqscan/experiment.hpp"
#include "seqscan/index.hpp"
#include "seqscan/recipes.hpp"

using namespace seqscan;

namespace {

const char* kFullConfig = R"({
  "name": "everything",
  "episodes": 25,
  "master_seed": 9,
  "M": 2,
  "zeta": "inf",
  "statistic": "ALR",
  "policies": ["CL", {"name": "slow", "kind": "CL", "zeta": 1.2}, "OL"],
  "rho_reference": "OL",
  "processes": [
    {"prior": 0.4, "cost": 2, "alpha": 0.01, "beta": 0.001, "switch_delay": 1,
     "h0": {"kind": "poisson", "rate": 10}, "h1": {"kind": "poisson", "rate": 15}},
    {"prior": 0.6, "cost": 1, "alpha": 0.01, "beta": 0.01, "truth": 1,
     "grid": [{"model": {"kind": "poisson", "rate": 10}, "region": "theta0"},
              {"model": {"kind": "poisson", "rate": 11}, "region": "indifference"},
              {"model": {"kind": "poisson", "rate": 13}, "region": "theta1", "weight": 0.25},
              {"model": {"kind": "poisson", "rate": 16}, "region": "theta1", "weight": 0.75}]},
    {"prior": 0.5, "cost": 3,
     "h0": {"kind": "gaussian", "mean": 0, "stddev": 1}, "h1": {"kind": "gaussian", "mean": 1, "stddev": 1}},
    {"prior": 0.5, "cost": 1,
     "h0": {"kind": "categorical", "probabilities": [0.5, 0.5]},
     "h1": {"kind": "categorical", "probabilities": [0.2, 0.8]}}
  ],
  "sweep": {"variable": "alpha", "values": [0.01, 0.001]}
})";

std::string message_of(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string csv_of(const std::vector<BatchSummary>& rows) {
  std::ostringstream os;
  write_summary_csv(os, rows);
  return os.str();
}

ExperimentConfig small_config() {
  auto c = figure_recipe("fig1", 4);
  c.episodes = 60;
  return c;
}

}  // namespace

TEST(Config, RoundTripIsIdentity) {
  std::vector<ExperimentConfig> configs{parse_config(kFullConfig)};
  for (const auto& name : figure_names()) configs.push_back(figure_recipe(name));
  for (const auto& entry : std::filesystem::directory_iterator(SEQSCAN_TEST_DATA "/../../configs")) {
    configs.push_back(load_config(entry.path()));
  }
  for (const auto& c : configs) {
    validate_config(c);
    const std::string once = serialize_config(c);
    const auto again = parse_config(once);
    validate_config(again);
    EXPECT_EQ(serialize_config(again), once) << c.name;
  }
}

TEST(Config, ParsesFields) {
  const auto c = parse_config(kFullConfig);
  EXPECT_EQ(c.m, 2u);
  EXPECT_TRUE(std::isinf(c.zeta));
  EXPECT_EQ(c.statistic, StatisticKind::ALR);
  ASSERT_EQ(c.policies.size(), 3u);
  EXPECT_EQ(c.policies[1].zeta.value(), 1.2);
  EXPECT_EQ(c.policies[2].kind, PolicyKind::OpenLoop);
  ASSERT_EQ(c.processes.size(), 4u);
  EXPECT_EQ(c.processes[1].forced_truth.value(), 1);
  EXPECT_EQ(std::get<GridModels>(c.processes[1].models).grid->size(), 4u);
  EXPECT_EQ(c.processes[0].switch_delay, 1);
}

TEST(Config, ValidationMessages) {
  EXPECT_NE(message_of(R"({"name": "x", "bogus": 1, "generator": {"type": "homogeneous"}})").find("unknown field 'bogus'"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"processes": [{"h0": {"kind": "weibull"}, "h1": {"kind": "poisson", "rate": 1}}]})")
                .find("process 1: unknown model kind 'weibull'"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"processes": [{"alpha": 0.5, "beta": 0.5, "h0": {"kind": "poisson", "rate": 10},
                                          "h1": {"kind": "poisson", "rate": 15}}]})")
                .find("process 1: alpha + beta must be < 1"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"statistic": "SPRT", "generator": {"type": "composite_mixture", "K": 3}})")
                .find("grid models need statistic GLR or ALR"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"policies": ["CL"], "rho_reference": "OL", "generator": {"type": "homogeneous"}})")
                .find("rho_reference"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"M": 11, "generator": {"type": "homogeneous", "K": 10}})").find("1 <= M <= K"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"name": "nothing"})").find("exactly one of"), std::string::npos);
  EXPECT_NE(message_of("{not json").find("not valid JSON"), std::string::npos);
  EXPECT_NE(message_of(R"({"generator": {"type": "homogeneous"}, "sweep": {"variable": "d2", "values": [1]}})")
                .find("two_level"),
            std::string::npos);
}

TEST(Config, LoadReportsPath) {
  try {
    load_config("/nonexistent/seqscan.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/seqscan.json"), std::string::npos);
  }
}

TEST(Generators, CompositeMixtureSpacing) {
  GeneratorSpec g;
  g.type = GeneratorType::CompositeMixture;
  g.k = 5;
  ExperimentConfig c;
  c.generator = g;
  c.statistic = StatisticKind::GLR;
  const auto specs = specs_at(c, std::nan(""));
  ASSERT_EQ(specs.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    const double theta0 = 10.0 + 2.5 * static_cast<double>(k);
    EXPECT_DOUBLE_EQ(specs[k].cost_rate, theta0);
    const auto& grid = *std::get<GridModels>(specs[k].models).grid;
    EXPECT_DOUBLE_EQ(std::get<PoissonParams>(grid.point(0).model.params()).rate, theta0);
    EXPECT_DOUBLE_EQ(std::get<PoissonParams>(grid.point(1).model.params()).rate, 1.2 * theta0);
    EXPECT_DOUBLE_EQ(std::get<PoissonParams>(grid.point(2).model.params()).rate, 1.5 * theta0);
  }
}

TEST(Generators, TwoLevelDelaysAndSweeps) {
  auto c = figure_recipe("fig3");
  const auto specs = specs_at(c, 6);
  ASSERT_EQ(specs.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_EQ(specs[k].switch_delay, k < 5 ? 1 : 6);
    EXPECT_DOUBLE_EQ(specs[k].cost_rate, k < 5 ? 10.0 : 20.0);
  }
  const auto fig4 = specs_at(figure_recipe("fig4"), 100.0);
  for (const auto& s : fig4) {
    EXPECT_DOUBLE_EQ(s.alpha, 0.01);
    EXPECT_DOUBLE_EQ(s.beta, 0.01);
    EXPECT_DOUBLE_EQ(s.cost_rate, 1.0);
  }
}

TEST(Generators, ExplorationPairIndexRatio) {
  const auto c = figure_recipe("fig5");
  for (double alpha : c.sweep->values) {
    const auto specs = specs_at(c, alpha);
    ASSERT_EQ(specs.size(), 2u);
    EXPECT_DOUBLE_EQ(specs[0].alpha, alpha);
    double gamma[2];
    for (int k = 0; k < 2; ++k) {
      const auto& m = std::get<KnownModels>(specs[k].models);
      const auto sizes = expected_sample_sizes(specs[k].alpha, specs[k].beta, kl_divergence(m.h0, m.h1),
                                               kl_divergence(m.h1, m.h0));
      const auto b = initial_belief(specs[k].prior);
      gamma[k] = index(b, specs[k].cost_rate, expected_detection_time(b, sizes.given_h0, sizes.given_h1), true).value;
    }
    EXPECT_NEAR(gamma[0] / gamma[1], 2.0, 1e-9) << alpha;
  }
}

TEST(Recipes, ScaleDividesKAndEpisodes) {
  const auto full = figure_recipe("fig1");
  EXPECT_EQ(full.episodes, 10000u);
  EXPECT_EQ(full.sweep->values, (std::vector<double>{4, 8, 12, 16, 20}));
  const auto quarter = figure_recipe("fig1", 4);
  EXPECT_EQ(quarter.episodes, 2500u);
  EXPECT_EQ(quarter.sweep->values, (std::vector<double>{1, 2, 3, 4, 5}));
  const auto fig2 = figure_recipe("fig2", 4);
  for (double k : fig2.sweep->values) {
    EXPECT_GE(k, 5.0);
    EXPECT_EQ(std::fmod(k, 2.0), 0.0);
  }
  EXPECT_THROW(figure_recipe("fig9"), ConfigError);
  EXPECT_THROW(figure_recipe("fig1", 0.5), ConfigError);
}

TEST(Csv, Formatting) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
  EXPECT_EQ(format_number(19.1531521317619), "19.15315213");
  EXPECT_EQ(format_number(std::nan("")), "");
  EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST(Csv, HeaderAndRows) {
  const std::string header =
      "sweep_value,policy,episodes,mean_cost,stderr_cost,fa_rate,md_rate,mean_samples,lower_bound,cost_over_bound,rho,"
      "error\n";
  EXPECT_EQ(csv_of({}), header);
  BatchSummary row;
  row.sweep_value = std::nan("");
  row.policy = "CL";
  row.episodes = 3;
  row.mean_cost = 1.5;
  row.mean_samples = {2, 4};
  row.lower_bound = std::nan("");
  row.cost_over_bound = std::nan("");
  row.rho = 1;
  row.error = "boom, \"quoted\"";
  EXPECT_EQ(csv_of({row}), header + ",CL,3,1.5,0,0,0,3,,,1,\"boom, \"\"quoted\"\"\"\n");
}

TEST(Csv, WriteFailureNamesPath) {
  const auto dir = std::filesystem::temp_directory_path() / "seqscan_csv_dir";
  std::filesystem::create_directories(dir);
  try {
    emit_csv({}, dir);  // a directory cannot be opened as a file
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_NE(std::string(e.what()).find(dir.string()), std::string::npos);
  }
}

TEST(Experiment, ZeroEpisodesGiveNoRows) {
  auto c = small_config();
  c.episodes = 0;
  const auto out = run_experiment(c);
  EXPECT_TRUE(out.rows.empty());
  const std::string csv = csv_of(out.rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Experiment, DeterministicAndKernelIndependent) {
  const auto c = small_config();
  const auto a = csv_of(run_experiment(c).rows);
  const auto b = csv_of(run_experiment(c).rows);
  ExperimentOptions serial;
  serial.parallel = false;
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, csv_of(run_experiment(c, serial).rows));
  auto other = c;
  other.master_seed = 2;
  EXPECT_NE(a, csv_of(run_experiment(other).rows));
}

TEST(Experiment, AggregatesMatchEpisodeRecords) {
  auto c = figure_recipe("fig2", 4);
  c.episodes = 80;
  ExperimentOptions opts;
  opts.keep_episodes = true;
  const auto out = run_experiment(c, opts);
  ASSERT_EQ(out.episodes.size(), out.rows.size() * c.episodes);

  std::map<std::pair<double, std::string>, std::vector<double>> costs;
  std::map<std::pair<double, std::string>, std::pair<int, int>> fa;
  for (const auto& rec : out.episodes) {
    costs[{rec.sweep_value, rec.policy}].push_back(rec.result.cost);
    auto& f = fa[{rec.sweep_value, rec.policy}];
    for (const auto& p : rec.result.processes) {
      if (!p.abnormal) {
        ++f.second;
        f.first += p.false_alarm;
      }
    }
  }
  for (const auto& row : out.rows) {
    const auto& xs = costs.at({row.sweep_value, row.policy});
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(row.mean_cost, mean, 1e-9 * mean);
    EXPECT_NEAR(row.stderr_cost, std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-9 * mean);
    const auto& f = fa.at({row.sweep_value, row.policy});
    EXPECT_DOUBLE_EQ(row.fa_rate, f.second ? double(f.first) / f.second : 0.0);
    if (row.policy == "OL") EXPECT_DOUBLE_EQ(row.rho, 1.0);
  }
}

TEST(Experiment, EpisodeCsvHasOneLinePerProcess) {
  auto c = small_config();
  c.episodes = 5;
  ExperimentOptions opts;
  opts.keep_episodes = true;
  const auto out = run_experiment(c, opts);
  std::ostringstream os;
  write_episode_csv(os, out.episodes);
  std::size_t lines = 1;
  for (const auto& rec : out.episodes) lines += rec.result.processes.size();
  const std::string csv = os.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), lines);
}

TEST(Experiment, FailedBatchIsIsolated) {
  // Near-identical hypotheses: alpha 0.4 stops quickly, 1e-300 runs into the episode cap.
  const auto c = parse_config(R"({
    "name": "isolation", "episodes": 1, "policies": ["CL"],
    "processes": [{"prior": 0.5, "truth": 0, "h0": {"kind": "poisson", "rate": 10},
                   "h1": {"kind": "poisson", "rate": 10.01}}],
    "sweep": {"variable": "alpha", "values": [0.4, 1e-300]}
  })");
  const auto out = run_experiment(c);
  ASSERT_EQ(out.rows.size(), 2u);
  EXPECT_TRUE(out.rows[0].error.empty());
  EXPECT_NE(out.rows[1].error.find("exceeded"), std::string::npos);
  EXPECT_NE(csv_of(out.rows).find("exceeded"), std::string::npos);
}
