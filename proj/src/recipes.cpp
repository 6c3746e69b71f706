#include "seqscan/recipes.hpp"

#include <algorithm>
#include <cmath>

namespace seqscan {

namespace {

constexpr std::uint64_t kDefaultEpisodes = 10000;

std::vector<double> scaled_k(std::vector<double> ks, double scale, double minimum, bool even) {
  for (double& k : ks) {
    double v = std::max(minimum, std::round(k / scale));
    if (even) v = 2.0 * std::ceil(v / 2.0);
    k = v;
  }
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

PolicyEntry entry(const std::string& name, PolicyKind kind, std::optional<double> zeta = std::nullopt) {
  return {name, kind, zeta};
}

}  // namespace

std::vector<std::string> figure_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5"}; }

bool is_risk_recipe(const std::string& name) { return name == "fig4"; }

ExperimentConfig figure_recipe(const std::string& name, double scale) {
  if (!(scale >= 1.0)) throw ConfigError("--scale must be >= 1");
  ExperimentConfig c;
  c.name = name;
  c.episodes = static_cast<std::uint64_t>(std::max(1.0, std::round(static_cast<double>(kDefaultEpisodes) / scale)));
  c.master_seed = 1;
  GeneratorSpec g;

  if (name == "fig1") {
    // Composite deviations, costs theta0, one probe.
    g.type = GeneratorType::CompositeMixture;
    c.statistic = StatisticKind::GLR;
    c.policies = {entry("CL", PolicyKind::ClosedLoop), entry("OL", PolicyKind::OpenLoop)};
    c.rho_reference = "OL";
    c.sweep = SweepSpec{SweepVariable::K, scaled_k({4, 8, 12, 16, 20}, scale, 1, false)};
  } else if (name == "fig2") {
    g.type = GeneratorType::TwoLevel;
    c.m = 5;
    c.policies = {entry("CL", PolicyKind::ClosedLoop), entry("OL", PolicyKind::OpenLoop)};
    c.rho_reference = "OL";
    c.sweep = SweepSpec{SweepVariable::K, scaled_k({10, 20, 30, 40}, scale, 6, true)};
  } else if (name == "fig3") {
    g.type = GeneratorType::TwoLevel;
    g.k = static_cast<std::size_t>(scaled_k({10}, scale, 2, true).front());
    g.d1 = 1;
    c.policies = {entry("CL", PolicyKind::ClosedLoop), entry("OL", PolicyKind::OpenLoop)};
    c.rho_reference = "OL";
    c.sweep = SweepSpec{SweepVariable::D2, {0, 1, 2, 4, 6, 8}};
  } else if (name == "fig4") {
    g.type = GeneratorType::Homogeneous;
    g.k = static_cast<std::size_t>(scaled_k({10}, scale, 1, false).front());
    g.cost_is_theta0 = false;
    g.cost = 1.0;
    c.policies = {entry("CL", PolicyKind::ClosedLoop)};
    std::vector<double> ce;
    for (int i = 2; i <= 8; ++i) ce.push_back(std::pow(10.0, 0.5 * i));
    c.sweep = SweepSpec{SweepVariable::CostOfError, ce};
  } else if (name == "fig5") {
    g.type = GeneratorType::ExplorationPair;
    g.cost_is_theta0 = false;
    g.cost = 1.0;
    g.alpha = g.beta = 1e-2;
    c.policies = {entry("CL", PolicyKind::ClosedLoop, 1.005), entry("CL-no-explore", PolicyKind::ClosedLoop, kNoExploration)};
    c.rho_reference = "CL-no-explore";
    c.sweep = SweepSpec{SweepVariable::Alpha, {1e-1, 1e-2, 1e-3, 1e-4}};
  } else {
    throw ConfigError("unknown figure '" + name + "' (expected fig1..fig5)");
  }
  c.generator = g;
  return c;
}

}  // namespace seqscan
