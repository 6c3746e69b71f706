#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "seqscan/obs_model.hpp"
#include "seqscan/sprt.hpp"

namespace seqscan {

enum class Region { Theta0, Theta1, Indifference };

enum class Hypothesis { H0 = 0, H1 = 1 };

enum class CompositeStatistic { GLR, ALR };

struct GridPoint {
  ObservationModel model;
  Region region;
  // Relative prior plausibility within the point's region. Only used to pick
  // the initial estimate and to average a priori sample sizes.
  double weight = 1.0;
};

/// Finite parameter space split into Theta0, Theta1 and an optional
/// indifference region. Pairwise divergences are precomputed.
class ParameterGrid {
 public:
  /// Throws std::invalid_argument if Theta0 or Theta1 is empty, models mix
  /// kinds, or a weight is negative.
  explicit ParameterGrid(std::vector<GridPoint> points);

  std::size_t size() const { return points_.size(); }
  const GridPoint& point(std::size_t i) const { return points_[i]; }
  const std::vector<GridPoint>& points() const { return points_; }
  const std::vector<std::size_t>& members(Region r) const;

  /// D(point i || point j).
  double divergence(std::size_t i, std::size_t j) const { return kl_[i * points_.size() + j]; }

  /// inf over the region of D(point i || theta).
  double divergence_to_region(std::size_t i, Region r) const;

  /// Weight normalised within its region (0 for indifference points).
  double region_weight(std::size_t i) const;

  /// Grid point of maximal prior plausibility (prior * weight for Theta1,
  /// (1 - prior) * weight for Theta0), ties to the lowest index.
  std::size_t initial_estimate(double prior) const;

 private:
  std::vector<GridPoint> points_;
  std::vector<std::size_t> theta0_;
  std::vector<std::size_t> theta1_;
  std::vector<std::size_t> indifference_;
  std::vector<double> kl_;
  std::vector<double> normalised_weight_;
};

/// B(0) = log(1/alpha) declares normal, B(1) = log(1/beta) declares abnormal.
struct CompositeBoundaries {
  double b0;
  double b1;
};

CompositeBoundaries composite_boundaries(double alpha, double beta);

/// Sufficient statistics of one process under a grid model.
struct CompositeState {
  std::vector<double> log_lik;   // cumulative log-likelihood per grid point
  std::int64_t n_obs = 0;
  std::size_t mle = 0;           // theta-hat(n); the initial estimate while n_obs == 0
  std::size_t mle_prev = 0;      // theta-hat(n-1), used for the latest adaptive term
  double adaptive_sum = 0.0;     // sum_r log f(y_r | theta-hat(r-1))
  double prior = 0.5;
  double estimated_belief = 0.5;
};

CompositeState make_composite_state(const ParameterGrid& grid, double prior);

/// Adds one observation. A grid point that cannot emit y drops to -inf and
/// leaves the argmax. Throws std::domain_error if no grid point can emit y.
void ingest(CompositeState& state, const ParameterGrid& grid, Observation y);

struct RegionMax {
  std::size_t index;
  double log_lik;
};

/// Maximiser of the cumulative log-likelihood restricted to a region; ties to
/// the lowest index. log_lik is -inf if every member is ruled out.
RegionMax restricted_max(const CompositeState& state, const ParameterGrid& grid, Region r);

/// Statistic for declaring `declare`: unrestricted max minus the max over the
/// region being rejected.
double glr_statistic(const CompositeState& state, const ParameterGrid& grid, Hypothesis declare);

/// Adaptive sum minus the max over the region being rejected.
double alr_statistic(const CompositeState& state, const ParameterGrid& grid, Hypothesis declare);

/// Simultaneous crossings go to the larger boundary excess; ties to abnormal.
Verdict check_stop_composite(const CompositeState& state, const ParameterGrid& grid, const CompositeBoundaries& b,
                             CompositeStatistic which);

/// Posterior-odds belief against the current restricted MLEs, evaluated from
/// the per-point cumulative log-likelihoods in O(|grid|).
double estimated_belief(const CompositeState& state, const ParameterGrid& grid);

/// ingest() followed by the belief recomputation; returns the new belief.
double estimated_belief_update(CompositeState& state, const ParameterGrid& grid, Observation y);

/// b0 / D(mle || Theta1) if mle is in Theta0, b1 / D(mle || Theta0) if in
/// Theta1. An indifference-region mle uses the formula of the region it is
/// closer to in KL (ties to Theta1).
double estimated_expected_sample_size(const CompositeState& state, const ParameterGrid& grid,
                                      const CompositeBoundaries& b);

/// Composite sequential test over a shared grid.
class CompositeTest {
 public:
  CompositeTest(std::shared_ptr<const ParameterGrid> grid, double prior, double alpha, double beta,
                CompositeStatistic statistic);

  Verdict observe(Observation y);

  const CompositeState& state() const { return state_; }
  const ParameterGrid& grid() const { return *grid_; }
  const CompositeBoundaries& boundaries() const { return bounds_; }
  CompositeStatistic statistic() const { return statistic_; }
  double expected_sample_size() const { return estimated_expected_sample_size(state_, *grid_, bounds_); }

 private:
  std::shared_ptr<const ParameterGrid> grid_;
  CompositeBoundaries bounds_;
  CompositeStatistic statistic_;
  CompositeState state_;
};

}  // namespace seqscan
