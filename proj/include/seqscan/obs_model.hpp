#pragma once

#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "seqscan/random.hpp"

namespace seqscan {

/// Observations are carried as doubles. Poisson counts and categorical
/// indices are integral values stored exactly.
using Observation = double;

/// KL divergences that would be infinite saturate at this value so that
/// expected sample sizes and indices stay finite and comparable.
inline constexpr double kSaturatedDivergence = 1e300;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PoissonParams {
  double rate;
  // Precomputed sampler constants; derived from rate.
  std::poisson_distribution<long long>::param_type sampler{1.0};
};

struct GaussianParams {
  double mean;
  double stddev;
};

struct CategoricalParams {
  std::vector<double> probabilities;
};

enum class ModelKind { Poisson, Gaussian, Categorical };

/// Immutable observation distribution. Construction validates parameters;
/// an invalid model cannot exist.
class ObservationModel {
 public:
  static ObservationModel poisson(double rate);
  static ObservationModel gaussian(double mean, double stddev);
  static ObservationModel categorical(std::vector<double> probabilities);

  ModelKind kind() const;
  std::string describe() const;

  /// One draw. Poisson and Gaussian consume the engine through the standard
  /// distributions; categorical uses a single uniform and the inverse CDF.
  Observation sample(RandomStream& rng) const;

  /// Exact log probability mass/density. Throws std::domain_error when y is
  /// outside the support (non-integer or negative Poisson count, bad
  /// category index, non-finite Gaussian value). A category with zero mass
  /// returns -inf.
  double log_density(Observation y) const;

  /// Whether y lies in the support of the model's kind (mass may still be 0).
  bool in_support(Observation y) const;

  const std::variant<PoissonParams, GaussianParams, CategoricalParams>& params() const {
    return params_;
  }

  bool operator==(const ObservationModel& other) const;

 private:
  explicit ObservationModel(std::variant<PoissonParams, GaussianParams, CategoricalParams> p)
      : params_(std::move(p)) {}

  std::variant<PoissonParams, GaussianParams, CategoricalParams> params_;
};

/// D(p || q). Throws std::invalid_argument for mismatched kinds. Returns
/// kSaturatedDivergence when q puts zero mass where p does not.
double kl_divergence(const ObservationModel& p, const ObservationModel& q);

inline bool is_saturated(double divergence) { return divergence >= kSaturatedDivergence; }

/// log(y!) for a non-negative integer y. Thread-safe.
double log_factorial(double y);

}  // namespace seqscan
