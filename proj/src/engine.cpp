#include "seqscan/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "seqscan/index.hpp"

namespace seqscan {

namespace {

std::string process_label(std::size_t k) { return "process " + std::to_string(k + 1); }

std::size_t draw_grid_point(const ParameterGrid& grid, Region region, double u) {
  const auto& members = grid.members(region);
  double cumulative = 0.0;
  for (std::size_t i : members) {
    cumulative += grid.region_weight(i);
    if (u < cumulative) return i;
  }
  return members.back();
}

/// Per-process runtime: sequential test plus index bookkeeping.
class ProcessRuntime {
 public:
  ProcessRuntime(const ProcessSpec& spec, const PolicyConfig& policy) : spec_(&spec), test_(make_test(spec, policy)) {}

  Verdict observe(Observation y) {
    return std::visit([&](auto& t) { return t.observe(y); }, test_);
  }

  double index_value() const {
    if (const auto* s = std::get_if<SimpleTest>(&test_)) {
      const BeliefState belief{posterior_from_llr(spec_->prior, s->state().sum_llr), spec_->prior};
      const double e = expected_detection_time(belief, s->sample_sizes().given_h0, s->sample_sizes().given_h1);
      return index(belief, spec_->cost_rate, e, true).value;
    }
    const auto& c = std::get<CompositeTest>(test_);
    const BeliefState belief{c.state().estimated_belief, spec_->prior};
    return index(belief, spec_->cost_rate, c.expected_sample_size(), true).value;
  }

  /// Sum-LLR for the SPRT, GLR/ALR statistic for declaring H1 otherwise.
  double statistic() const {
    if (const auto* s = std::get_if<SimpleTest>(&test_)) return s->state().sum_llr;
    const auto& c = std::get<CompositeTest>(test_);
    return c.statistic() == CompositeStatistic::GLR ? glr_statistic(c.state(), c.grid(), Hypothesis::H1)
                                                    : alr_statistic(c.state(), c.grid(), Hypothesis::H1);
  }

 private:
  using Test = std::variant<SimpleTest, CompositeTest>;

  static Test make_test(const ProcessSpec& spec, const PolicyConfig& policy) {
    if (const auto* known = std::get_if<KnownModels>(&spec.models)) {
      return SimpleTest(known->h0, known->h1, spec.alpha, spec.beta);
    }
    const auto& grid = std::get<GridModels>(spec.models).grid;
    return CompositeTest(grid, spec.prior, spec.alpha, spec.beta, policy.statistic);
  }

  const ProcessSpec* spec_;
  Test test_;
};

}  // namespace

void validate_specs(std::span<const ProcessSpec> specs, const PolicyConfig& policy) {
  if (specs.empty()) throw std::invalid_argument("need at least one process");
  if (policy.m == 0 || policy.m > specs.size()) {
    throw std::invalid_argument("probe budget M must satisfy 1 <= M <= K");
  }
  if (!(policy.zeta > 1.0)) throw std::invalid_argument("zeta must be > 1");
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    auto fail = [&](const std::string& what) { throw std::invalid_argument(process_label(k) + ": " + what); };
    if (!(s.prior >= 0.0 && s.prior <= 1.0)) fail("prior must lie in [0, 1]");
    if (!(s.cost_rate >= 0.0) || !std::isfinite(s.cost_rate)) fail("cost rate must be finite and non-negative");
    if (!(s.alpha > 0.0 && s.alpha < 1.0) || !(s.beta > 0.0 && s.beta < 1.0)) fail("alpha and beta must lie in (0, 1)");
    if (!(s.alpha + s.beta < 1.0)) fail("alpha + beta must be < 1");
    if (s.switch_delay < 0) fail("switch delay must be non-negative");
    if (s.forced_truth && *s.forced_truth != 0 && *s.forced_truth != 1) fail("forced truth must be 0 or 1");
    if (const auto* known = std::get_if<KnownModels>(&s.models)) {
      if (known->h0.kind() != known->h1.kind()) fail("h0 and h1 must be the same model kind");
      if (!(kl_divergence(known->h0, known->h1) > 0.0) || !(kl_divergence(known->h1, known->h0) > 0.0)) {
        fail("h0 and h1 must be distinguishable (positive KL divergence)");
      }
    } else {
      const auto& grid = std::get<GridModels>(s.models).grid;
      if (!grid) fail("missing parameter grid");
    }
  }
}

std::int64_t apply_switching_delay(std::span<const ProcessId> previous, std::span<const ProcessId> next,
                                   std::span<const ProcessSpec> specs, bool first_step) {
  if (first_step) return 0;
  std::int64_t delay = 0;
  for (ProcessId id : next) {
    if (std::find(previous.begin(), previous.end(), id) == previous.end()) delay += specs[id].switch_delay;
  }
  return delay;
}

double a_priori_expected_size(const ProcessSpec& spec) {
  if (const auto* known = std::get_if<KnownModels>(&spec.models)) {
    const auto sizes = expected_sample_sizes(spec.alpha, spec.beta, kl_divergence(known->h0, known->h1),
                                             kl_divergence(known->h1, known->h0));
    return spec.prior * sizes.given_h1 + (1.0 - spec.prior) * sizes.given_h0;
  }
  const auto& grid = *std::get<GridModels>(spec.models).grid;
  const auto b = composite_boundaries(spec.alpha, spec.beta);
  double e1 = 0.0;
  for (std::size_t i : grid.members(Region::Theta1)) {
    e1 += grid.region_weight(i) * b.b1 / grid.divergence_to_region(i, Region::Theta0);
  }
  double e0 = 0.0;
  for (std::size_t i : grid.members(Region::Theta0)) {
    e0 += grid.region_weight(i) * b.b0 / grid.divergence_to_region(i, Region::Theta1);
  }
  return spec.prior * e1 + (1.0 - spec.prior) * e0;
}

std::vector<ProcessOutcome> draw_truths(std::span<const ProcessSpec> specs, RandomStream& rng) {
  std::vector<ProcessOutcome> out(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    const double u = rng.uniform();
    out[k].abnormal = s.forced_truth ? *s.forced_truth == 1 : u < s.prior;
    if (const auto* g = std::get_if<GridModels>(&s.models)) {
      if (!g->grid) throw std::invalid_argument(process_label(k) + ": missing parameter grid");
      out[k].truth_point = draw_grid_point(*g->grid, out[k].abnormal ? Region::Theta1 : Region::Theta0, rng.uniform());
    }
  }
  return out;
}

double episode_cost(std::span<const ProcessSpec> specs, const EpisodeResult& result) {
  double cost = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& p = result.processes[k];
    if (p.abnormal && p.declaration == 1) cost += specs[k].cost_rate * static_cast<double>(p.stop_time);
  }
  return cost;
}

EpisodeResult run_episode(std::span<const ProcessSpec> specs, const PolicyConfig& policy, RandomStream& rng,
                          EpisodeTrace* trace) {
  const std::size_t k_count = specs.size();
  EpisodeResult result;

  result.processes = draw_truths(specs, rng);
  std::vector<ObservationModel> truth_models;
  truth_models.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& p = result.processes[k];
    if (const auto* known = std::get_if<KnownModels>(&specs[k].models)) {
      truth_models.push_back(p.abnormal ? known->h1 : known->h0);
    } else {
      truth_models.push_back(std::get<GridModels>(specs[k].models).grid->point(p.truth_point).model);
    }
  }

  std::vector<ProcessRuntime> runtimes;
  runtimes.reserve(k_count);
  for (const auto& s : specs) runtimes.emplace_back(s, policy);

  std::vector<IndexValue> indices(k_count);
  for (std::size_t k = 0; k < k_count; ++k) indices[k] = {runtimes[k].index_value(), true};

  PolicyState state = PolicyState::initial(k_count, policy.m);
  ExplorationSchedule schedule(policy.kind == PolicyKind::ClosedLoop ? policy.zeta : kNoExploration);
  std::optional<OpenLoopPlan> plan;
  if (policy.kind == PolicyKind::OpenLoop) {
    std::vector<double> priors(k_count), costs(k_count), sizes(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      priors[k] = specs[k].prior;
      costs[k] = specs[k].cost_rate;
      sizes[k] = a_priori_expected_size(specs[k]);
    }
    plan.emplace(ol_order(priors, costs, sizes), policy.m);
  }

  const auto m = static_cast<std::int64_t>(policy.m);
  std::vector<ProcessId> previous;
  std::int64_t n = 0;
  std::int64_t clock = 0;
  while (state.active_count > 0) {
    ++n;
    const bool exploration = plan ? false : schedule.contains(n);
    std::vector<ProcessId> selected = plan ? plan->select(state) : select_cl(indices, state, n, schedule);

    const std::int64_t delay = apply_switching_delay(previous, selected, specs, n == 1);
    clock += delay + 1;
    result.total_delay += delay;
    result.idle_slots += (m - 1) * delay + (m - static_cast<std::int64_t>(selected.size()));
    if (clock > kEpisodeTimeCap) {
      throw EpisodeCapExceeded("episode exceeded " + std::to_string(kEpisodeTimeCap) + " time units");
    }

    TraceStep* step = nullptr;
    if (trace) {
      trace->steps.push_back({n, clock, exploration, selected, {}, {}, {}});
      step = &trace->steps.back();
    }
    for (ProcessId id : selected) {
      const Observation y = truth_models[id].sample(rng);
      const Verdict v = runtimes[id].observe(y);
      auto& out = result.processes[id];
      ++out.samples;
      if (v != Verdict::Continue) {
        out.declaration = v == Verdict::DeclareAbnormal ? 1 : 0;
        out.stop_time = clock;
        out.false_alarm = !out.abnormal && out.declaration == 1;
        out.miss_detect = out.abnormal && out.declaration == 0;
        state.deactivate(id);
        indices[id] = {0.0, false};
      } else {
        indices[id] = {runtimes[id].index_value(), true};
      }
      if (step) {
        step->observations.push_back(y);
        step->sum_statistic.push_back(runtimes[id].statistic());
      }
    }
    if (step) {
      step->indices.reserve(k_count);
      for (const auto& iv : indices) step->indices.push_back(iv.value);
    }
    previous = std::move(selected);
  }
  result.steps = n;
  result.final_time = clock;
  result.cost = episode_cost(specs, result);
  return result;
}

double lower_bound_oracle(std::span<const BoundTerm> abnormal, std::size_t m) {
  if (m == 0) throw std::invalid_argument("probe budget must be positive");
  std::vector<BoundTerm> terms(abnormal.begin(), abnormal.end());
  for (const auto& t : terms) {
    if (!(t.divergence > 0.0) || !(t.expected_size > 0.0)) throw std::invalid_argument("lower bound needs positive KL divergences");
  }
  if (terms.empty()) return 0.0;
  std::stable_sort(terms.begin(), terms.end(), [](const BoundTerm& a, const BoundTerm& b) {
    return a.cost / a.expected_size > b.cost / b.expected_size;
  });
  if (m == 1) {
    double bound = 0.0;
    double elapsed = 0.0;
    for (const auto& t : terms) {
      elapsed += t.boundary / t.divergence;
      bound += t.cost * elapsed;
    }
    return bound;
  }
  for (const auto& t : terms) {
    if (t.cost != terms.front().cost) return std::numeric_limits<double>::quiet_NaN();
  }
  // Stripe the ordered jobs over M machines: job m + (i-1)M runs i-th on machine m.
  double bound = 0.0;
  for (std::size_t machine = 0; machine < m; ++machine) {
    double elapsed = 0.0;
    for (std::size_t j = machine; j < terms.size(); j += m) {
      elapsed += terms[j].boundary / terms[j].divergence;
      bound += terms[j].cost * elapsed;
    }
  }
  return bound;
}

std::vector<BoundTerm> bound_terms(std::span<const ProcessSpec> specs, std::span<const ProcessOutcome> truth) {
  std::vector<BoundTerm> terms;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    if (!truth[k].abnormal) continue;
    const auto& s = specs[k];
    if (const auto* known = std::get_if<KnownModels>(&s.models)) {
      const double d10 = kl_divergence(known->h1, known->h0);
      const auto sizes = expected_sample_sizes(s.alpha, s.beta, kl_divergence(known->h0, known->h1), d10);
      terms.push_back({s.cost_rate, wald_boundaries(s.alpha, s.beta).upper_b, d10, sizes.given_h1});
    } else {
      const auto& grid = *std::get<GridModels>(s.models).grid;
      const double b1 = composite_boundaries(s.alpha, s.beta).b1;
      const double d = grid.divergence_to_region(truth[k].truth_point, Region::Theta0);
      terms.push_back({s.cost_rate, b1, d, b1 / d});
    }
  }
  return terms;
}

bool equal_costs(std::span<const ProcessSpec> specs) {
  return std::all_of(specs.begin(), specs.end(),
                     [&](const ProcessSpec& s) { return s.cost_rate == specs.front().cost_rate; });
}

BayesRisk bayes_risk(std::span<const EpisodeResult> batch, double c_e) {
  if (!(c_e > 0.0)) throw std::invalid_argument("c_e must be positive");
  if (batch.empty()) return {0.0, 0.0, 0.0, 0.0};
  const std::size_t k_count = batch.front().processes.size();
  std::vector<double> fa(k_count, 0.0), normals(k_count, 0.0), md(k_count, 0.0), abnormals(k_count, 0.0);
  for (const auto& r : batch) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& p = r.processes[k];
      if (p.abnormal) {
        abnormals[k] += 1.0;
        md[k] += p.miss_detect ? 1.0 : 0.0;
      } else {
        normals[k] += 1.0;
        fa[k] += p.false_alarm ? 1.0 : 0.0;
      }
    }
  }
  std::vector<double> error_rate(k_count);
  double fa_total = 0.0, md_total = 0.0, n_total = 0.0, a_total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double pfa = normals[k] > 0.0 ? fa[k] / normals[k] : 0.0;
    const double pmd = abnormals[k] > 0.0 ? md[k] / abnormals[k] : 0.0;
    error_rate[k] = pfa + pmd;
    fa_total += fa[k];
    md_total += md[k];
    n_total += normals[k];
    a_total += abnormals[k];
  }
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& r : batch) {
    double term = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& p = r.processes[k];
      if (p.abnormal) term += static_cast<double>(p.stop_time) / c_e + error_rate[k];
    }
    sum += term;
    sum_sq += term * term;
  }
  const double count = static_cast<double>(batch.size());
  const double mean = sum / count;
  const double var = count > 1.0 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)) : 0.0;
  return {mean, std::sqrt(var / count), n_total > 0.0 ? fa_total / n_total : 0.0,
          a_total > 0.0 ? md_total / a_total : 0.0};
}

}  // namespace seqscan
