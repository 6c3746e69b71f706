#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "seqscan/obs_model.hpp"

using namespace seqscan;

namespace {

double poisson_kl_by_summation(double p, double q) {
  double sum = 0.0;
  const auto mp = ObservationModel::poisson(p);
  const auto mq = ObservationModel::poisson(q);
  for (int y = 0; y < 400; ++y) {
    const double lp = mp.log_density(y);
    sum += std::exp(lp) * (lp - mq.log_density(y));
  }
  return sum;
}

}  // namespace

TEST(ObservationModel, PoissonLogDensity) {
  EXPECT_NEAR(ObservationModel::poisson(10).log_density(10), -2.07856164313506, 1e-12);
}

TEST(ObservationModel, GaussianLogDensity) {
  EXPECT_NEAR(ObservationModel::gaussian(0, 1).log_density(0), -0.918938533204673, 1e-13);
}

TEST(ObservationModel, CategoricalLogDensity) {
  EXPECT_DOUBLE_EQ(ObservationModel::categorical({0.5, 0.5}).log_density(1), std::log(0.5));
  EXPECT_EQ(ObservationModel::categorical({1.0, 0.0}).log_density(1), kNegInf);
}

TEST(ObservationModel, OutOfSupportThrows) {
  EXPECT_THROW(ObservationModel::poisson(10).log_density(-1), std::domain_error);
  EXPECT_THROW(ObservationModel::poisson(10).log_density(2.5), std::domain_error);
  EXPECT_THROW(ObservationModel::categorical({0.5, 0.5}).log_density(2), std::domain_error);
}

TEST(ObservationModel, RejectsBadParameters) {
  EXPECT_THROW(ObservationModel::poisson(0), std::invalid_argument);
  EXPECT_THROW(ObservationModel::gaussian(0, 0), std::invalid_argument);
  EXPECT_THROW(ObservationModel::categorical({0.5, 0.4}), std::invalid_argument);
}

TEST(ObservationModel, DegenerateCategoricalSample) {
  RandomStream rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(ObservationModel::categorical({1.0}).sample(rng), 0.0);
}

TEST(ObservationModel, SamplingIsDeterministicPerSeed) {
  const auto m = ObservationModel::poisson(10);
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(m.sample(a), m.sample(b));
}

TEST(ObservationModel, PoissonSampleMean) {
  const auto m = ObservationModel::poisson(10);
  RandomStream rng(11);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += m.sample(rng);
  EXPECT_NEAR(sum / n, 10.0, 0.05);
}

TEST(KlDivergence, PoissonClosedForm) {
  const auto p10 = ObservationModel::poisson(10);
  const auto p15 = ObservationModel::poisson(15);
  EXPECT_EQ(kl_divergence(p10, p10), 0.0);
  EXPECT_NEAR(kl_divergence(p15, p10), 1.08197662162247, 1e-13);
  EXPECT_NEAR(kl_divergence(p10, p15), 0.945348918918356, 1e-13);
}

TEST(KlDivergence, PoissonMatchesSummation) {
  for (double p : {1.0, 10.0, 12.0, 15.0, 30.0}) {
    for (double q : {1.0, 10.0, 12.0, 15.0, 30.0}) {
      EXPECT_NEAR(kl_divergence(ObservationModel::poisson(p), ObservationModel::poisson(q)),
                  poisson_kl_by_summation(p, q), 1e-9)
          << p << " vs " << q;
    }
  }
}

TEST(KlDivergence, GaussianMatchesQuadrature) {
  const auto p = ObservationModel::gaussian(1.0, 2.0);
  const auto q = ObservationModel::gaussian(-0.5, 1.5);
  double sum = 0.0;
  const double h = 1e-3;
  for (double x = -40.0; x <= 40.0; x += h) {
    const double lp = p.log_density(x);
    sum += std::exp(lp) * (lp - q.log_density(x)) * h;
  }
  EXPECT_NEAR(kl_divergence(p, q), sum, 1e-9);
}

TEST(KlDivergence, CategoricalSaturatesOnMissingMass) {
  const auto p = ObservationModel::categorical({0.5, 0.5});
  const auto q = ObservationModel::categorical({1.0, 0.0});
  EXPECT_TRUE(is_saturated(kl_divergence(p, q)));
  EXPECT_NEAR(kl_divergence(q, p), std::log(2.0), 1e-15);
}

TEST(KlDivergence, MismatchedKindsThrow) {
  EXPECT_THROW(kl_divergence(ObservationModel::poisson(1), ObservationModel::gaussian(0, 1)), std::invalid_argument);
  EXPECT_THROW(kl_divergence(ObservationModel::categorical({1.0}), ObservationModel::categorical({0.5, 0.5})),
               std::invalid_argument);
}

TEST(KlDivergence, NonNegativeAndZeroOnlyOnDiagonal) {
  const double rates[] = {0.5, 2.0, 10.0, 10.1, 15.0};
  for (double a : rates) {
    for (double b : rates) {
      const double d = kl_divergence(ObservationModel::poisson(a), ObservationModel::poisson(b));
      EXPECT_GE(d, 0.0);
      EXPECT_EQ(d == 0.0, a == b);
    }
  }
}

TEST(KlDivergence, MonteCarloEstimateAgrees) {
  const std::pair<ObservationModel, ObservationModel> pairs[] = {
      {ObservationModel::poisson(15), ObservationModel::poisson(10)},
      {ObservationModel::gaussian(0.5, 1.0), ObservationModel::gaussian(0.0, 2.0)},
      {ObservationModel::categorical({0.2, 0.3, 0.5}), ObservationModel::categorical({0.4, 0.4, 0.2})},
  };
  RandomStream rng(5);
  for (const auto& [p, q] : pairs) {
    const int n = 100'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = p.sample(rng);
      const double term = p.log_density(y) - q.log_density(y);
      sum += term;
      sum_sq += term * term;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, kl_divergence(p, q), 3.0 * se) << p.describe();
  }
}

TEST(LogFactorial, TableAndLgammaAgree) {
  EXPECT_DOUBLE_EQ(log_factorial(0), 0.0);
  EXPECT_NEAR(log_factorial(1023), std::lgamma(1024.0), 1e-9);
  EXPECT_NEAR(log_factorial(5000), std::lgamma(5001.0), 1e-9);
}
