#include "seqscan/obs_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace seqscan {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_nonneg_integer(double y) { return std::isfinite(y) && y >= 0.0 && std::floor(y) == y; }

constexpr std::size_t kFactorialTableSize = 1024;

const std::array<double, kFactorialTableSize>& factorial_table() {
  static const auto table = [] {
    std::array<double, kFactorialTableSize> t{};
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(double y) {
  if (y < static_cast<double>(kFactorialTableSize)) return factorial_table()[static_cast<std::size_t>(y)];
  int sign = 0;
  return ::lgamma_r(y + 1.0, &sign);
}

ObservationModel ObservationModel::poisson(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("Poisson rate must be positive and finite");
  }
  PoissonParams p{rate, std::poisson_distribution<long long>::param_type(rate)};
  return ObservationModel(p);
}

ObservationModel ObservationModel::gaussian(double mean, double stddev) {
  if (!std::isfinite(mean)) throw std::invalid_argument("Gaussian mean must be finite");
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw std::invalid_argument("Gaussian stddev must be positive and finite");
  }
  return ObservationModel(GaussianParams{mean, stddev});
}

ObservationModel ObservationModel::categorical(std::vector<double> probabilities) {
  if (probabilities.empty()) throw std::invalid_argument("categorical model needs at least one category");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("categorical probabilities must be non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("categorical probabilities must sum to 1");
  return ObservationModel(CategoricalParams{std::move(probabilities)});
}

ModelKind ObservationModel::kind() const {
  return std::visit(overloaded{[](const PoissonParams&) { return ModelKind::Poisson; },
                               [](const GaussianParams&) { return ModelKind::Gaussian; },
                               [](const CategoricalParams&) { return ModelKind::Categorical; }},
                    params_);
}

std::string ObservationModel::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const PoissonParams& p) { os << "Poisson(" << p.rate << ")"; },
                        [&](const GaussianParams& p) { os << "Gaussian(" << p.mean << ", " << p.stddev << ")"; },
                        [&](const CategoricalParams& p) {
                          os << "Categorical(";
                          for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
                            os << (i ? ", " : "") << p.probabilities[i];
                          }
                          os << ")";
                        }},
             params_);
  return os.str();
}

Observation ObservationModel::sample(RandomStream& rng) const {
  return std::visit(
      overloaded{[&](const PoissonParams& p) {
                   std::poisson_distribution<long long> dist;
                   return static_cast<double>(dist(rng.engine(), p.sampler));
                 },
                 [&](const GaussianParams& p) {
                   std::normal_distribution<double> dist(p.mean, p.stddev);
                   return dist(rng.engine());
                 },
                 [&](const CategoricalParams& p) {
                   const double u = rng.uniform();
                   double cumulative = 0.0;
                   std::size_t last_positive = 0;
                   for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
                     if (p.probabilities[i] <= 0.0) continue;
                     last_positive = i;
                     cumulative += p.probabilities[i];
                     if (u < cumulative) return static_cast<double>(i);
                   }
                   // Rounding left u above the accumulated mass.
                   return static_cast<double>(last_positive);
                 }},
      params_);
}

bool ObservationModel::in_support(Observation y) const {
  return std::visit(overloaded{[&](const PoissonParams&) { return is_nonneg_integer(y); },
                               [&](const GaussianParams&) { return std::isfinite(y); },
                               [&](const CategoricalParams& p) {
                                 return is_nonneg_integer(y) && y < static_cast<double>(p.probabilities.size());
                               }},
                    params_);
}

double ObservationModel::log_density(Observation y) const {
  if (!in_support(y)) {
    std::ostringstream os;
    os << "observation " << y << " outside the support of " << describe();
    throw std::domain_error(os.str());
  }
  return std::visit(overloaded{[&](const PoissonParams& p) { return y * std::log(p.rate) - p.rate - log_factorial(y); },
                               [&](const GaussianParams& p) {
                                 const double z = (y - p.mean) / p.stddev;
                                 return -0.5 * z * z - std::log(p.stddev) - 0.5 * std::log(2.0 * M_PI);
                               },
                               [&](const CategoricalParams& p) {
                                 const double mass = p.probabilities[static_cast<std::size_t>(y)];
                                 return mass > 0.0 ? std::log(mass) : kNegInf;
                               }},
                    params_);
}

bool ObservationModel::operator==(const ObservationModel& other) const {
  if (kind() != other.kind()) return false;
  return std::visit(overloaded{[&](const PoissonParams& p) { return p.rate == std::get<PoissonParams>(other.params_).rate; },
                               [&](const GaussianParams& p) {
                                 const auto& o = std::get<GaussianParams>(other.params_);
                                 return p.mean == o.mean && p.stddev == o.stddev;
                               },
                               [&](const CategoricalParams& p) {
                                 return p.probabilities == std::get<CategoricalParams>(other.params_).probabilities;
                               }},
                    params_);
}

double kl_divergence(const ObservationModel& p, const ObservationModel& q) {
  if (p.kind() != q.kind()) throw std::invalid_argument("KL divergence between different model kinds");
  double d = 0.0;
  switch (p.kind()) {
    case ModelKind::Poisson: {
      const double lp = std::get<PoissonParams>(p.params()).rate;
      const double lq = std::get<PoissonParams>(q.params()).rate;
      d = lp * std::log(lp / lq) + lq - lp;
      break;
    }
    case ModelKind::Gaussian: {
      const auto& a = std::get<GaussianParams>(p.params());
      const auto& b = std::get<GaussianParams>(q.params());
      const double dm = a.mean - b.mean;
      d = std::log(b.stddev / a.stddev) + (a.stddev * a.stddev + dm * dm) / (2.0 * b.stddev * b.stddev) - 0.5;
      break;
    }
    case ModelKind::Categorical: {
      const auto& a = std::get<CategoricalParams>(p.params()).probabilities;
      const auto& b = std::get<CategoricalParams>(q.params()).probabilities;
      if (a.size() != b.size()) throw std::invalid_argument("KL divergence between categoricals of different sizes");
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] <= 0.0) continue;
        if (b[i] <= 0.0) return kSaturatedDivergence;
        d += a[i] * std::log(a[i] / b[i]);
      }
      break;
    }
  }
  // Closed forms can dip a few ulps below zero for identical arguments.
  return std::min(std::max(d, 0.0), kSaturatedDivergence);
}

}  // namespace seqscan
