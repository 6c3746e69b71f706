#pragma once

#include <cstdint>

#include "seqscan/obs_model.hpp"

namespace seqscan {

enum class Verdict { Continue, DeclareNormal, DeclareAbnormal };

/// Wald boundaries: declare normal at or below lower_a, abnormal at or above upper_b.
struct SprtBoundaries {
  double lower_a;
  double upper_b;
};

/// Sum-LLR memory of one process. Only probed instants contribute.
struct SprtState {
  double sum_llr = 0.0;
  std::int64_t samples_taken = 0;
};

/// A = log(beta / (1 - alpha)), B = log((1 - beta) / alpha).
/// Throws std::invalid_argument unless 0 < alpha, beta and alpha + beta < 1.
SprtBoundaries wald_boundaries(double alpha, double beta);

/// Throws std::invalid_argument for a non-finite increment.
SprtState update_llr(SprtState state, double llr_increment);

/// Ties at a boundary resolve to a declaration.
Verdict check_stop(const SprtState& state, const SprtBoundaries& b);

struct ConditionalSampleSizes {
  double given_h0;
  double given_h1;
};

/// Wald approximations of E(N | H0) and E(N | H1) for the SPRT with error
/// budgets (alpha, beta). d01 = D(f0 || f1), d10 = D(f1 || f0).
ConditionalSampleSizes expected_sample_sizes(double alpha, double beta, double d01, double d10);

/// log f1(y) - log f0(y), evaluated as a difference of log-densities.
double llr_increment(const ObservationModel& h0, const ObservationModel& h1, Observation y);

/// Throws std::invalid_argument unless 0 < alpha, beta < 1 and alpha + beta < 1.
void check_error_budgets(double alpha, double beta);

/// SPRT for a process with fully known f0, f1.
class SimpleTest {
 public:
  SimpleTest(ObservationModel h0, ObservationModel h1, double alpha, double beta);

  Verdict observe(Observation y);

  const SprtState& state() const { return state_; }
  const SprtBoundaries& boundaries() const { return bounds_; }
  const ConditionalSampleSizes& sample_sizes() const { return sizes_; }
  const ObservationModel& h0() const { return h0_; }
  const ObservationModel& h1() const { return h1_; }
  double d01() const { return d01_; }
  double d10() const { return d10_; }

 private:
  ObservationModel h0_;
  ObservationModel h1_;
  SprtBoundaries bounds_;
  double d01_;
  double d10_;
  ConditionalSampleSizes sizes_;
  SprtState state_;
};

}  // namespace seqscan
