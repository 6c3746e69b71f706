#include <cmath>

#include <gtest/gtest.h>

#include "seqscan/index.hpp"
#include "seqscan/obs_model.hpp"
#include "seqscan/random.hpp"

using namespace seqscan;

TEST(BayesUpdate, UnprobedIsUnchanged) {
  const auto b = bayes_update({0.3, 0.5}, -1.0, -2.0, false);
  EXPECT_EQ(b.posterior, 0.3);
  EXPECT_EQ(b.prior, 0.5);
}

TEST(BayesUpdate, UninformativeObservation) {
  EXPECT_DOUBLE_EQ(bayes_update(initial_belief(0.5), -2.5, -2.5, true).posterior, 0.5);
}

TEST(BayesUpdate, PoissonObservation) {
  const auto h0 = ObservationModel::poisson(10);
  const auto h1 = ObservationModel::poisson(15);
  const auto b = bayes_update(initial_belief(0.5), h0.log_density(12), h1.log_density(12), true);
  EXPECT_NEAR(b.posterior, 0.466445831593505, 1e-12);
}

TEST(BayesUpdate, ImpossibleObservationThrows) {
  EXPECT_THROW(bayes_update(initial_belief(0.5), kNegInf, kNegInf, true), std::domain_error);
}

TEST(BayesUpdate, MatchesSumLlrClosedForm) {
  const auto h0 = ObservationModel::poisson(10);
  const auto h1 = ObservationModel::poisson(15);
  RandomStream rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const double prior = 0.02 + 0.96 * rng.uniform();
    const auto& truth = rep % 2 ? h1 : h0;
    BeliefState b = initial_belief(prior);
    double s = 0.0;
    for (int i = 0; i < 40; ++i) {
      const double y = truth.sample(rng);
      b = bayes_update(b, h0.log_density(y), h1.log_density(y), true);
      s += h1.log_density(y) - h0.log_density(y);
      const double d = (1.0 - prior) / prior;
      ASSERT_NEAR(b.posterior, 1.0 / (d * std::exp(-s) + 1.0), 1e-10);
      ASSERT_NEAR(posterior_from_llr(prior, s), b.posterior, 1e-10);
    }
  }
}

TEST(ExpectedDetectionTime, Mixture) {
  EXPECT_DOUBLE_EQ(expected_detection_time({0.0, 0.5}, 7.0, 12.0), 7.0);
  EXPECT_DOUBLE_EQ(expected_detection_time({1.0, 0.5}, 7.0, 12.0), 12.0);
  EXPECT_NEAR(expected_detection_time({0.5, 0.5}, 7.30709597350131, 12.7687699363110), 10.0379329549062, 1e-12);
}

TEST(Index, Values) {
  EXPECT_DOUBLE_EQ(index({0.5, 0.5}, 10.0, 20.0, true).value, 0.25);
  const auto off = index({0.5, 0.5}, 10.0, 20.0, false);
  EXPECT_EQ(off.value, 0.0);
  EXPECT_FALSE(off.active);
  EXPECT_EQ(index({0.9, 0.5}, 0.0, 3.0, true).value, 0.0);
}
