#include "seqscan/composite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqscan {

namespace {

Region rejected_region(Hypothesis declare) { return declare == Hypothesis::H1 ? Region::Theta0 : Region::Theta1; }

double unrestricted_max(const CompositeState& state) { return state.log_lik[state.mle]; }

std::size_t argmax_all(const std::vector<double>& ll, std::size_t fallback) {
  std::size_t best = fallback;
  double best_v = kNegInf;
  for (std::size_t i = 0; i < ll.size(); ++i) {
    if (ll[i] > best_v) {
      best_v = ll[i];
      best = i;
    }
  }
  return best;
}

}  // namespace

ParameterGrid::ParameterGrid(std::vector<GridPoint> points) : points_(std::move(points)) {
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (points_[i].model.kind() != points_.front().model.kind()) {
      throw std::invalid_argument("parameter grid mixes observation model kinds");
    }
    if (!(points_[i].weight >= 0.0) || !std::isfinite(points_[i].weight)) {
      throw std::invalid_argument("parameter grid weights must be non-negative");
    }
    switch (points_[i].region) {
      case Region::Theta0: theta0_.push_back(i); break;
      case Region::Theta1: theta1_.push_back(i); break;
      case Region::Indifference: indifference_.push_back(i); break;
    }
  }
  if (theta0_.empty() || theta1_.empty()) {
    throw std::invalid_argument("parameter grid needs non-empty Theta0 and Theta1");
  }
  kl_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) kl_[i * n + j] = kl_divergence(points_[i].model, points_[j].model);
  }
  normalised_weight_.assign(n, 0.0);
  for (const auto* region : {&theta0_, &theta1_}) {
    double total = 0.0;
    for (std::size_t i : *region) total += points_[i].weight;
    for (std::size_t i : *region) {
      normalised_weight_[i] = total > 0.0 ? points_[i].weight / total : 1.0 / static_cast<double>(region->size());
    }
  }
}

const std::vector<std::size_t>& ParameterGrid::members(Region r) const {
  switch (r) {
    case Region::Theta0: return theta0_;
    case Region::Theta1: return theta1_;
    case Region::Indifference: break;
  }
  return indifference_;
}

double ParameterGrid::divergence_to_region(std::size_t i, Region r) const {
  const auto& m = members(r);
  if (m.empty()) throw std::invalid_argument("divergence to an empty region");
  double best = kSaturatedDivergence;
  for (std::size_t j : m) best = std::min(best, divergence(i, j));
  return best;
}

double ParameterGrid::region_weight(std::size_t i) const { return normalised_weight_[i]; }

std::size_t ParameterGrid::initial_estimate(double prior) const {
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double plausibility = 0.0;
    if (points_[i].region == Region::Theta0) plausibility = (1.0 - prior) * normalised_weight_[i];
    if (points_[i].region == Region::Theta1) plausibility = prior * normalised_weight_[i];
    if (plausibility > best_v) {
      best_v = plausibility;
      best = i;
    }
  }
  return best;
}

CompositeBoundaries composite_boundaries(double alpha, double beta) {
  check_error_budgets(alpha, beta);
  return {std::log(1.0 / alpha), std::log(1.0 / beta)};
}

CompositeState make_composite_state(const ParameterGrid& grid, double prior) {
  if (!(prior >= 0.0 && prior <= 1.0)) throw std::invalid_argument("prior must lie in [0, 1]");
  CompositeState s;
  s.log_lik.assign(grid.size(), 0.0);
  s.mle = grid.initial_estimate(prior);
  s.mle_prev = s.mle;
  s.prior = prior;
  s.estimated_belief = prior;
  return s;
}

void ingest(CompositeState& state, const ParameterGrid& grid, Observation y) {
  bool any_possible = false;
  std::vector<double> increments(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    increments[i] = grid.point(i).model.log_density(y);
    any_possible = any_possible || increments[i] > kNegInf;
  }
  if (!any_possible) throw std::domain_error("observation has zero likelihood under every grid point");

  state.mle_prev = state.mle;
  state.adaptive_sum += increments[state.mle_prev];
  for (std::size_t i = 0; i < grid.size(); ++i) state.log_lik[i] += increments[i];
  ++state.n_obs;
  state.mle = argmax_all(state.log_lik, state.mle);
  state.estimated_belief = estimated_belief(state, grid);
}

RegionMax restricted_max(const CompositeState& state, const ParameterGrid& grid, Region r) {
  const auto& m = grid.members(r);
  RegionMax best{m.front(), kNegInf};
  for (std::size_t i : m) {
    if (state.log_lik[i] > best.log_lik) best = {i, state.log_lik[i]};
  }
  return best;
}

double glr_statistic(const CompositeState& state, const ParameterGrid& grid, Hypothesis declare) {
  const double denom = restricted_max(state, grid, rejected_region(declare)).log_lik;
  const double num = unrestricted_max(state);
  if (denom == kNegInf) return std::numeric_limits<double>::infinity();
  return std::max(0.0, num - denom);
}

double alr_statistic(const CompositeState& state, const ParameterGrid& grid, Hypothesis declare) {
  const double denom = restricted_max(state, grid, rejected_region(declare)).log_lik;
  if (denom == kNegInf) return std::numeric_limits<double>::infinity();
  return state.adaptive_sum - denom;
}

Verdict check_stop_composite(const CompositeState& state, const ParameterGrid& grid, const CompositeBoundaries& b,
                             CompositeStatistic which) {
  if (state.n_obs == 0) return Verdict::Continue;
  auto stat = [&](Hypothesis h) {
    return which == CompositeStatistic::GLR ? glr_statistic(state, grid, h) : alr_statistic(state, grid, h);
  };
  const double excess1 = stat(Hypothesis::H1) - b.b1;
  const double excess0 = stat(Hypothesis::H0) - b.b0;
  const bool cross1 = excess1 >= 0.0;
  const bool cross0 = excess0 >= 0.0;
  if (cross1 && cross0) {
    // inf - inf style ties land here as NaN comparisons; treat as abnormal.
    return excess0 > excess1 ? Verdict::DeclareNormal : Verdict::DeclareAbnormal;
  }
  if (cross1) return Verdict::DeclareAbnormal;
  if (cross0) return Verdict::DeclareNormal;
  return Verdict::Continue;
}

double estimated_belief(const CompositeState& state, const ParameterGrid& grid) {
  if (state.prior <= 0.0) return 0.0;
  if (state.prior >= 1.0) return 1.0;
  const double ll1 = restricted_max(state, grid, Region::Theta1).log_lik;
  const double ll0 = restricted_max(state, grid, Region::Theta0).log_lik;
  if (ll1 == kNegInf) return 0.0;
  if (ll0 == kNegInf) return 1.0;
  const double logit = std::log(state.prior) - std::log1p(-state.prior) + (ll1 - ll0);
  return 1.0 / (1.0 + std::exp(-logit));
}

double estimated_belief_update(CompositeState& state, const ParameterGrid& grid, Observation y) {
  ingest(state, grid, y);
  return state.estimated_belief;
}

double estimated_expected_sample_size(const CompositeState& state, const ParameterGrid& grid,
                                      const CompositeBoundaries& b) {
  const std::size_t m = state.mle;
  Region side = grid.point(m).region;
  if (side == Region::Indifference) {
    side = grid.divergence_to_region(m, Region::Theta1) <= grid.divergence_to_region(m, Region::Theta0)
               ? Region::Theta1
               : Region::Theta0;
  }
  if (side == Region::Theta0) return b.b0 / grid.divergence_to_region(m, Region::Theta1);
  return b.b1 / grid.divergence_to_region(m, Region::Theta0);
}

CompositeTest::CompositeTest(std::shared_ptr<const ParameterGrid> grid, double prior, double alpha, double beta,
                             CompositeStatistic statistic)
    : grid_(std::move(grid)),
      bounds_(composite_boundaries(alpha, beta)),
      statistic_(statistic),
      state_(make_composite_state(*grid_, prior)) {}

Verdict CompositeTest::observe(Observation y) {
  ingest(state_, *grid_, y);
  return check_stop_composite(state_, *grid_, bounds_, statistic_);
}

}  // namespace seqscan
