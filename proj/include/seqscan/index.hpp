#pragma once

namespace seqscan {

/// Belief that a process is abnormal.
struct BeliefState {
  double posterior;
  double prior;
};

struct IndexValue {
  double value = 0.0;
  bool active = false;
};

inline BeliefState initial_belief(double prior) { return {prior, prior}; }

/// Bayes rule in log space. An unprobed process is returned unchanged.
/// Throws std::domain_error if both log-densities are -inf.
BeliefState bayes_update(BeliefState belief, double f0_logpdf, double f1_logpdf, bool probed);

/// Posterior from the sum-LLR: (d e^{-S} + 1)^{-1} with d = (1 - prior) / prior.
/// Evaluated through the log-odds so that extreme posteriors keep their order.
double posterior_from_llr(double prior, double sum_llr);

/// pi * E(N | H1) + (1 - pi) * E(N | H0).
double expected_detection_time(const BeliefState& belief, double e_n_h0, double e_n_h1);

/// pi * c / E when active, 0 otherwise.
IndexValue index(const BeliefState& belief, double cost, double expected_time, bool active);

}  // namespace seqscan
