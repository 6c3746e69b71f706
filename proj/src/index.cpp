#include "seqscan/index.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqscan {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sigmoid(double logit) { return 1.0 / (1.0 + std::exp(-logit)); }

double prior_log_odds(double prior) {
  if (prior <= 0.0) return kNegInf;
  if (prior >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(prior) - std::log1p(-prior);
}

}  // namespace

BeliefState bayes_update(BeliefState belief, double f0_logpdf, double f1_logpdf, bool probed) {
  if (!probed) return belief;
  if (f0_logpdf == kNegInf && f1_logpdf == kNegInf) {
    throw std::domain_error("observation impossible under both hypotheses");
  }
  const double pi = belief.posterior;
  if (pi <= 0.0 || pi >= 1.0) return belief;
  if (f1_logpdf == kNegInf) return {0.0, belief.prior};
  if (f0_logpdf == kNegInf) return {1.0, belief.prior};
  // log(pi f1) - log((1-pi) f0), then the logistic map.
  const double logit = std::log(pi) + f1_logpdf - std::log1p(-pi) - f0_logpdf;
  return {sigmoid(logit), belief.prior};
}

double posterior_from_llr(double prior, double sum_llr) {
  const double base = prior_log_odds(prior);
  if (std::isinf(base)) return prior <= 0.0 ? 0.0 : 1.0;
  return sigmoid(base + sum_llr);
}

double expected_detection_time(const BeliefState& belief, double e_n_h0, double e_n_h1) {
  return belief.posterior * e_n_h1 + (1.0 - belief.posterior) * e_n_h0;
}

IndexValue index(const BeliefState& belief, double cost, double expected_time, bool active) {
  if (!active) return {0.0, false};
  if (cost == 0.0 || belief.posterior == 0.0) return {0.0, true};
  return {belief.posterior * cost / expected_time, true};
}

}  // namespace seqscan
