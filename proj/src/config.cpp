#include "seqscan/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "seqscan/index.hpp"

namespace seqscan {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("field '") + key + "': " + e.what());
  }
}

double parse_zeta(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return kNoExploration;
    fail("zeta must be a number or \"inf\", got \"" + s + "\"");
  }
  if (!j.is_number()) fail("zeta must be a number or \"inf\"");
  return j.get<double>();
}

json zeta_json(double zeta) { return std::isinf(zeta) ? json("inf") : json(zeta); }

ObservationModel parse_model(const json& j) {
  const auto kind = get_or<std::string>(j, "kind", "");
  try {
    if (kind == "poisson") return ObservationModel::poisson(j.at("rate").get<double>());
    if (kind == "gaussian") return ObservationModel::gaussian(j.at("mean").get<double>(), j.at("stddev").get<double>());
    if (kind == "categorical") return ObservationModel::categorical(j.at("probabilities").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail("model '" + kind + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    fail("model '" + kind + "': " + e.what());
  }
  fail("unknown model kind '" + kind + "' (expected poisson, gaussian or categorical)");
}

json model_json(const ObservationModel& m) {
  switch (m.kind()) {
    case ModelKind::Poisson: return {{"kind", "poisson"}, {"rate", std::get<PoissonParams>(m.params()).rate}};
    case ModelKind::Gaussian: {
      const auto& g = std::get<GaussianParams>(m.params());
      return {{"kind", "gaussian"}, {"mean", g.mean}, {"stddev", g.stddev}};
    }
    case ModelKind::Categorical:
      return {{"kind", "categorical"}, {"probabilities", std::get<CategoricalParams>(m.params()).probabilities}};
  }
  return {};
}

Region parse_region(const std::string& s) {
  if (s == "theta0") return Region::Theta0;
  if (s == "theta1") return Region::Theta1;
  if (s == "indifference") return Region::Indifference;
  fail("unknown region '" + s + "' (expected theta0, theta1 or indifference)");
}

std::string region_name(Region r) {
  switch (r) {
    case Region::Theta0: return "theta0";
    case Region::Theta1: return "theta1";
    case Region::Indifference: break;
  }
  return "indifference";
}

ProcessSpec parse_process(const json& j, std::size_t index) {
  const std::string where = "process " + std::to_string(index + 1) + ": ";
  try {
    ProcessSpec s;
    s.prior = get_or<double>(j, "prior", 0.5);
    s.cost_rate = get_or<double>(j, "cost", 1.0);
    s.alpha = get_or<double>(j, "alpha", 1e-2);
    s.beta = get_or<double>(j, "beta", 1e-2);
    s.switch_delay = get_or<std::int64_t>(j, "switch_delay", 0);
    if (j.contains("truth")) s.forced_truth = j.at("truth").get<int>();
    if (j.contains("grid")) {
      std::vector<GridPoint> points;
      for (const auto& p : j.at("grid")) {
        points.push_back({parse_model(p.at("model")), parse_region(p.at("region").get<std::string>()),
                          get_or<double>(p, "weight", 1.0)});
      }
      try {
        s.models = GridModels{std::make_shared<const ParameterGrid>(std::move(points))};
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    } else if (j.contains("h0") && j.contains("h1")) {
      s.models = KnownModels{parse_model(j.at("h0")), parse_model(j.at("h1"))};
    } else {
      fail("needs either 'h0' and 'h1' or 'grid'");
    }
    return s;
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(where + e.what());
  }
}

json process_json(const ProcessSpec& s) {
  json j{{"prior", s.prior}, {"cost", s.cost_rate}, {"alpha", s.alpha}, {"beta", s.beta},
         {"switch_delay", s.switch_delay}};
  if (s.forced_truth) j["truth"] = *s.forced_truth;
  if (const auto* known = std::get_if<KnownModels>(&s.models)) {
    j["h0"] = model_json(known->h0);
    j["h1"] = model_json(known->h1);
  } else {
    json grid = json::array();
    for (const auto& p : std::get<GridModels>(s.models).grid->points()) {
      grid.push_back({{"model", model_json(p.model)}, {"region", region_name(p.region)}, {"weight", p.weight}});
    }
    j["grid"] = grid;
  }
  return j;
}

GeneratorType parse_generator_type(const std::string& s) {
  if (s == "composite_mixture") return GeneratorType::CompositeMixture;
  if (s == "two_level") return GeneratorType::TwoLevel;
  if (s == "homogeneous") return GeneratorType::Homogeneous;
  if (s == "exploration_pair") return GeneratorType::ExplorationPair;
  fail("unknown generator type '" + s + "'");
}

std::string generator_type_name(GeneratorType t) {
  switch (t) {
    case GeneratorType::CompositeMixture: return "composite_mixture";
    case GeneratorType::TwoLevel: return "two_level";
    case GeneratorType::Homogeneous: return "homogeneous";
    case GeneratorType::ExplorationPair: break;
  }
  return "exploration_pair";
}

GeneratorSpec parse_generator(const json& j) {
  GeneratorSpec g;
  try {
    g.type = parse_generator_type(j.at("type").get<std::string>());
  } catch (const json::exception& e) {
    fail(std::string("generator: ") + e.what());
  }
  g.k = get_or<std::size_t>(j, "K", g.k);
  g.prior = get_or<double>(j, "prior", g.prior);
  g.alpha = get_or<double>(j, "alpha", g.alpha);
  g.beta = get_or<double>(j, "beta", g.beta);
  if (j.contains("cost")) {
    if (j.at("cost").is_string()) {
      if (j.at("cost").get<std::string>() != "theta0") fail("generator cost must be a number or \"theta0\"");
      g.cost_is_theta0 = true;
    } else {
      g.cost_is_theta0 = false;
      g.cost = get_or<double>(j, "cost", g.cost);
    }
  }
  g.theta0_min = get_or<double>(j, "theta0_min", g.theta0_min);
  g.theta0_max = get_or<double>(j, "theta0_max", g.theta0_max);
  g.deviations = get_or<std::vector<double>>(j, "deviations", g.deviations);
  g.deviation_weights = get_or<std::vector<double>>(j, "deviation_weights", g.deviation_weights);
  g.theta0_low = get_or<double>(j, "theta0_low", g.theta0_low);
  g.theta0_high = get_or<double>(j, "theta0_high", g.theta0_high);
  g.deviation = get_or<double>(j, "deviation", g.deviation);
  g.d1 = get_or<std::int64_t>(j, "d1", g.d1);
  g.d2 = get_or<std::int64_t>(j, "d2", g.d2);
  g.theta0 = get_or<double>(j, "theta0", g.theta0);
  g.theta1 = get_or<double>(j, "theta1", g.theta1);
  g.theta1_pair = get_or<std::vector<double>>(j, "theta1_pair", g.theta1_pair);
  g.priors_pair = get_or<std::vector<double>>(j, "priors_pair", g.priors_pair);
  g.index_ratio = get_or<double>(j, "index_ratio", g.index_ratio);
  return g;
}

json generator_json(const GeneratorSpec& g) {
  json j{{"type", generator_type_name(g.type)}, {"alpha", g.alpha}, {"beta", g.beta}};
  if (g.cost_is_theta0) {
    j["cost"] = "theta0";
  } else {
    j["cost"] = g.cost;
  }
  switch (g.type) {
    case GeneratorType::CompositeMixture:
      j.update({{"K", g.k}, {"prior", g.prior}, {"theta0_min", g.theta0_min}, {"theta0_max", g.theta0_max},
                {"deviations", g.deviations}, {"deviation_weights", g.deviation_weights}});
      break;
    case GeneratorType::TwoLevel:
      j.update({{"K", g.k}, {"prior", g.prior}, {"theta0_low", g.theta0_low}, {"theta0_high", g.theta0_high},
                {"deviation", g.deviation}, {"d1", g.d1}, {"d2", g.d2}});
      break;
    case GeneratorType::Homogeneous:
      j.update({{"K", g.k}, {"prior", g.prior}, {"theta0", g.theta0}, {"theta1", g.theta1}});
      break;
    case GeneratorType::ExplorationPair:
      j.update({{"theta0", g.theta0}, {"theta1_pair", g.theta1_pair}, {"priors_pair", g.priors_pair},
                {"index_ratio", g.index_ratio}});
      break;
  }
  return j;
}

SweepVariable parse_sweep_variable(const std::string& s) {
  if (s == "K") return SweepVariable::K;
  if (s == "d2") return SweepVariable::D2;
  if (s == "c_e") return SweepVariable::CostOfError;
  if (s == "alpha") return SweepVariable::Alpha;
  fail("unknown sweep variable '" + s + "' (expected K, d2, c_e or alpha)");
}

StatisticKind parse_statistic(const std::string& s) {
  if (s == "SPRT") return StatisticKind::SPRT;
  if (s == "GLR") return StatisticKind::GLR;
  if (s == "ALR") return StatisticKind::ALR;
  fail("unknown statistic '" + s + "' (expected SPRT, GLR or ALR)");
}

PolicyEntry parse_policy(const json& j) {
  auto from_kind = [](const std::string& kind, PolicyEntry e) {
    if (kind == "CL") {
      e.kind = PolicyKind::ClosedLoop;
    } else if (kind == "OL") {
      e.kind = PolicyKind::OpenLoop;
    } else if (kind == "CL-no-explore") {
      e.kind = PolicyKind::ClosedLoop;
      e.zeta = kNoExploration;
    } else {
      fail("unknown policy '" + kind + "' (expected CL, OL or CL-no-explore)");
    }
    return e;
  };
  if (j.is_string()) {
    PolicyEntry e;
    e.name = j.get<std::string>();
    return from_kind(e.name, e);
  }
  PolicyEntry e;
  const auto kind = get_or<std::string>(j, "kind", "CL");
  e.name = get_or<std::string>(j, "name", kind);
  e = from_kind(kind, e);
  if (j.contains("zeta")) e.zeta = parse_zeta(j.at("zeta"));
  return e;
}

json policy_json(const PolicyEntry& e) {
  json j{{"name", e.name}, {"kind", e.kind == PolicyKind::OpenLoop ? "OL" : "CL"}};
  if (e.zeta) j["zeta"] = zeta_json(*e.zeta);
  return j;
}

std::vector<ProcessSpec> generate(const GeneratorSpec& g) {
  std::vector<ProcessSpec> out;
  auto cost_for = [&](double theta0) { return g.cost_is_theta0 ? theta0 : g.cost; };
  auto known = [](double t0, double t1) {
    return KnownModels{ObservationModel::poisson(t0), ObservationModel::poisson(t1)};
  };
  switch (g.type) {
    case GeneratorType::CompositeMixture: {
      if (g.deviations.empty() || g.deviations.size() != g.deviation_weights.size()) {
        fail("generator: deviations and deviation_weights must be non-empty and of equal length");
      }
      for (std::size_t k = 0; k < g.k; ++k) {
        const double t0 = g.k == 1 ? g.theta0_min
                                   : g.theta0_min + (g.theta0_max - g.theta0_min) * static_cast<double>(k) /
                                                        static_cast<double>(g.k - 1);
        std::vector<GridPoint> points{{ObservationModel::poisson(t0), Region::Theta0, 1.0}};
        for (std::size_t d = 0; d < g.deviations.size(); ++d) {
          points.push_back({ObservationModel::poisson(g.deviations[d] * t0), Region::Theta1, g.deviation_weights[d]});
        }
        ProcessSpec s;
        s.prior = g.prior;
        s.cost_rate = cost_for(t0);
        s.alpha = g.alpha;
        s.beta = g.beta;
        s.models = GridModels{std::make_shared<const ParameterGrid>(std::move(points))};
        out.push_back(std::move(s));
      }
      break;
    }
    case GeneratorType::TwoLevel:
      for (std::size_t k = 0; k < g.k; ++k) {
        const bool low = k < g.k / 2;
        const double t0 = low ? g.theta0_low : g.theta0_high;
        ProcessSpec s;
        s.prior = g.prior;
        s.cost_rate = cost_for(t0);
        s.alpha = g.alpha;
        s.beta = g.beta;
        s.switch_delay = low ? g.d1 : g.d2;
        s.models = known(t0, g.deviation * t0);
        out.push_back(std::move(s));
      }
      break;
    case GeneratorType::Homogeneous:
      for (std::size_t k = 0; k < g.k; ++k) {
        ProcessSpec s;
        s.prior = g.prior;
        s.cost_rate = cost_for(g.theta0);
        s.alpha = g.alpha;
        s.beta = g.beta;
        s.models = known(g.theta0, g.theta1);
        out.push_back(std::move(s));
      }
      break;
    case GeneratorType::ExplorationPair: {
      if (g.theta1_pair.size() != 2 || g.priors_pair.size() != 2) {
        fail("generator: theta1_pair and priors_pair need exactly two entries");
      }
      const double e2 = solve_pair_error(g, g.alpha);
      for (std::size_t k = 0; k < 2; ++k) {
        ProcessSpec s;
        s.prior = g.priors_pair[k];
        s.cost_rate = cost_for(g.theta0);
        s.alpha = s.beta = k == 0 ? g.alpha : e2;
        s.models = known(g.theta0, g.theta1_pair[k]);
        out.push_back(std::move(s));
      }
      break;
    }
  }
  return out;
}

double initial_index(double prior, double cost, double t0, double t1, double error) {
  const auto h0 = ObservationModel::poisson(t0);
  const auto h1 = ObservationModel::poisson(t1);
  const auto sizes = expected_sample_sizes(error, error, kl_divergence(h0, h1), kl_divergence(h1, h0));
  const BeliefState b = initial_belief(prior);
  return index(b, cost, expected_detection_time(b, sizes.given_h0, sizes.given_h1), true).value;
}

}  // namespace

double solve_pair_error(const GeneratorSpec& g, double error_1) {
  const double cost = g.cost_is_theta0 ? g.theta0 : g.cost;
  const double target =
      initial_index(g.priors_pair[0], cost, g.theta0, g.theta1_pair[0], error_1) / g.index_ratio;
  // The initial index of process 2 grows with its error budget.
  auto f = [&](double log_e) { return initial_index(g.priors_pair[1], cost, g.theta0, g.theta1_pair[1], std::exp(log_e)) - target; };
  double lo = std::log(1e-300);
  double hi = std::log(0.4999);
  if (f(lo) > 0.0 || f(hi) < 0.0) fail("exploration_pair: no error budget for process 2 meets index_ratio");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::K: return "K";
    case SweepVariable::D2: return "d2";
    case SweepVariable::CostOfError: return "c_e";
    case SweepVariable::Alpha: break;
  }
  return "alpha";
}

std::string to_string(StatisticKind s) {
  switch (s) {
    case StatisticKind::SPRT: return "SPRT";
    case StatisticKind::GLR: return "GLR";
    case StatisticKind::ALR: break;
  }
  return "ALR";
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");
  static const std::vector<std::string> known_keys{"name",     "episodes", "master_seed", "M",
                                                   "zeta",     "statistic", "policies",   "rho_reference",
                                                   "processes", "generator", "sweep"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end()) fail("unknown field '" + key + "'");
  }

  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  c.episodes = get_or<std::uint64_t>(j, "episodes", c.episodes);
  c.master_seed = get_or<std::uint64_t>(j, "master_seed", c.master_seed);
  c.m = get_or<std::size_t>(j, "M", c.m);
  if (j.contains("zeta")) c.zeta = parse_zeta(j.at("zeta"));
  c.statistic = parse_statistic(get_or<std::string>(j, "statistic", "SPRT"));
  if (j.contains("policies")) {
    for (const auto& p : j.at("policies")) c.policies.push_back(parse_policy(p));
  } else {
    c.policies.push_back(parse_policy(json("CL")));
  }
  if (j.contains("rho_reference")) c.rho_reference = j.at("rho_reference").get<std::string>();
  if (j.contains("processes")) {
    const auto& arr = j.at("processes");
    if (!arr.is_array()) fail("'processes' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) c.processes.push_back(parse_process(arr[i], i));
  }
  if (j.contains("generator")) c.generator = parse_generator(j.at("generator"));
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    SweepSpec sweep;
    sweep.variable = parse_sweep_variable(get_or<std::string>(s, "variable", ""));
    sweep.values = get_or<std::vector<double>>(s, "values", {});
    c.sweep = sweep;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  json j{{"name", c.name},
         {"episodes", c.episodes},
         {"master_seed", c.master_seed},
         {"M", c.m},
         {"zeta", zeta_json(c.zeta)},
         {"statistic", to_string(c.statistic)}};
  json policies = json::array();
  for (const auto& p : c.policies) policies.push_back(policy_json(p));
  j["policies"] = policies;
  if (c.rho_reference) j["rho_reference"] = *c.rho_reference;
  if (!c.processes.empty()) {
    json arr = json::array();
    for (const auto& p : c.processes) arr.push_back(process_json(p));
    j["processes"] = arr;
  }
  if (c.generator) j["generator"] = generator_json(*c.generator);
  if (c.sweep) j["sweep"] = {{"variable", to_string(c.sweep->variable)}, {"values", c.sweep->values}};
  return j.dump(2) + "\n";
}

std::vector<double> sweep_points(const ExperimentConfig& c) {
  if (!c.sweep) return {kNaN};
  return c.sweep->values;
}

std::vector<ProcessSpec> specs_at(const ExperimentConfig& c, double sweep_value) {
  const bool swept = c.sweep && !std::isnan(sweep_value);
  if (c.generator) {
    GeneratorSpec g = *c.generator;
    if (swept) {
      switch (c.sweep->variable) {
        case SweepVariable::K:
          if (!(sweep_value >= 1.0) || std::floor(sweep_value) != sweep_value) fail("sweep: K must be a positive integer");
          g.k = static_cast<std::size_t>(sweep_value);
          break;
        case SweepVariable::D2:
          if (g.type != GeneratorType::TwoLevel) fail("sweep: d2 needs the two_level generator");
          if (!(sweep_value >= 0.0) || std::floor(sweep_value) != sweep_value) fail("sweep: d2 must be a non-negative integer");
          g.d2 = static_cast<std::int64_t>(sweep_value);
          break;
        case SweepVariable::CostOfError:
          if (!(sweep_value > 2.0)) fail("sweep: c_e must exceed 2 so that 2/c_e < 1");
          g.alpha = g.beta = 1.0 / sweep_value;
          break;
        case SweepVariable::Alpha:
          g.alpha = g.beta = sweep_value;
          break;
      }
    }
    try {
      return generate(g);
    } catch (const std::invalid_argument& e) {
      fail(std::string("generator: ") + e.what());
    }
  }
  std::vector<ProcessSpec> specs = c.processes;
  if (swept) {
    switch (c.sweep->variable) {
      case SweepVariable::K:
      case SweepVariable::D2: fail("sweep: " + to_string(c.sweep->variable) + " needs a generator");
      case SweepVariable::CostOfError:
        if (!(sweep_value > 2.0)) fail("sweep: c_e must exceed 2 so that 2/c_e < 1");
        for (auto& s : specs) s.alpha = s.beta = 1.0 / sweep_value;
        break;
      case SweepVariable::Alpha:
        for (auto& s : specs) s.alpha = s.beta = sweep_value;
        break;
    }
  }
  return specs;
}

PolicyConfig policy_config(const ExperimentConfig& c, const PolicyEntry& entry, double) {
  PolicyConfig p;
  p.kind = entry.kind;
  p.m = c.m;
  p.zeta = entry.zeta.value_or(c.zeta);
  p.statistic = c.statistic == StatisticKind::ALR ? CompositeStatistic::ALR : CompositeStatistic::GLR;
  return p;
}

void validate_config(const ExperimentConfig& c) {
  if (c.processes.empty() == !c.generator.has_value()) fail("config needs exactly one of 'processes' or 'generator'");
  if (c.policies.empty()) fail("config needs at least one policy");
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    for (std::size_t j = i + 1; j < c.policies.size(); ++j) {
      if (c.policies[i].name == c.policies[j].name) fail("duplicate policy name '" + c.policies[i].name + "'");
    }
  }
  if (c.rho_reference) {
    const bool found = std::any_of(c.policies.begin(), c.policies.end(),
                                   [&](const PolicyEntry& p) { return p.name == *c.rho_reference; });
    if (!found) fail("rho_reference '" + *c.rho_reference + "' is not one of the policies");
  }
  if (c.sweep && c.sweep->values.empty()) fail("sweep needs at least one value");
  if (!(c.zeta > 1.0)) fail("zeta must be > 1");
  for (double v : sweep_points(c)) {
    const auto specs = specs_at(c, v);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      if (c.statistic == StatisticKind::SPRT && std::holds_alternative<GridModels>(specs[k].models)) {
        fail("process " + std::to_string(k + 1) + ": grid models need statistic GLR or ALR");
      }
    }
    for (const auto& entry : c.policies) {
      try {
        validate_specs(specs, policy_config(c, entry, v));
      } catch (const std::invalid_argument& e) {
        std::string where;
        if (c.sweep) {
          std::ostringstream os;
          os << "sweep " << to_string(c.sweep->variable) << "=" << v << ": ";
          where = os.str();
        }
        fail(where + e.what());
      }
    }
  }
}

}  // namespace seqscan
