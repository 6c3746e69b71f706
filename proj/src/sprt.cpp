#include "seqscan/sprt.hpp"

#include <cmath>
#include <stdexcept>

namespace seqscan {

void check_error_budgets(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("error budgets must lie in (0, 1)");
  }
  if (!(alpha + beta < 1.0)) throw std::invalid_argument("alpha + beta must be < 1");
}

SprtBoundaries wald_boundaries(double alpha, double beta) {
  check_error_budgets(alpha, beta);
  return {std::log(beta / (1.0 - alpha)), std::log((1.0 - beta) / alpha)};
}

SprtState update_llr(SprtState state, double llr_increment) {
  if (!std::isfinite(llr_increment)) throw std::invalid_argument("LLR increment must be finite");
  state.sum_llr += llr_increment;
  ++state.samples_taken;
  return state;
}

Verdict check_stop(const SprtState& state, const SprtBoundaries& b) {
  if (state.sum_llr >= b.upper_b) return Verdict::DeclareAbnormal;
  if (state.sum_llr <= b.lower_a) return Verdict::DeclareNormal;
  return Verdict::Continue;
}

ConditionalSampleSizes expected_sample_sizes(double alpha, double beta, double d01, double d10) {
  check_error_budgets(alpha, beta);
  if (!(d01 > 0.0) || !(d10 > 0.0)) throw std::invalid_argument("KL divergences must be positive");
  const double log_b = std::log((1.0 - beta) / alpha);
  const double log_a_inv = std::log((1.0 - alpha) / beta);
  return {((1.0 - alpha) * log_a_inv - alpha * log_b) / d01, ((1.0 - beta) * log_b - beta * log_a_inv) / d10};
}

double llr_increment(const ObservationModel& h0, const ObservationModel& h1, Observation y) {
  return h1.log_density(y) - h0.log_density(y);
}

SimpleTest::SimpleTest(ObservationModel h0, ObservationModel h1, double alpha, double beta)
    : h0_(std::move(h0)),
      h1_(std::move(h1)),
      bounds_(wald_boundaries(alpha, beta)),
      d01_(kl_divergence(h0_, h1_)),
      d10_(kl_divergence(h1_, h0_)),
      sizes_(expected_sample_sizes(alpha, beta, d01_, d10_)) {}

Verdict SimpleTest::observe(Observation y) {
  const double inc = llr_increment(h0_, h1_, y);
  if (std::isnan(inc)) throw std::domain_error("observation has zero likelihood under both hypotheses");
  if (std::isinf(inc)) {
    // One hypothesis is ruled out outright.
    state_.sum_llr = inc;
    ++state_.samples_taken;
  } else {
    state_ = update_llr(state_, inc);
  }
  return check_stop(state_, bounds_);
}

}  // namespace seqscan
