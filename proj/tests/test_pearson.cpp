// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "scengen/sampling.hpp"
#include "stat_util.hpp"

using scengen::fit_pearson;
using scengen::MarginalModel;
using scengen::MomentRegionError;
using scengen::PearsonFamily;
using scengen::Rng;

namespace {

bool near(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<double> draw(const MarginalModel& m, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = m.sample(rng);
  return out;
}

// checks the four sampled moments against the fit targets: 2% relative on
// the first two, 10% on the third and fourth (absolute floor 0.05 so
// symmetric targets stay checkable)
void check_convergence(const MarginalModel& m, std::uint64_t seed) {
  const auto mom = statutil::sample_moments(draw(m, 1000000, seed));
  CHECK(std::abs(mom.mean - m.mean) <=
        0.02 * std::max(std::abs(m.mean), std::sqrt(m.variance)));
  CHECK(std::abs(mom.variance - m.variance) <= 0.02 * m.variance);
  CHECK(std::abs(mom.skewness - m.skewness) <=
        std::max(0.10 * std::abs(m.skewness), 0.05));
  CHECK(std::abs(mom.kurtosis - m.kurtosis) <=
        std::max(0.10 * std::abs(m.kurtosis), 0.05));
}

struct BetaMoments {
  double mean, var, skew, kurt;
};

BetaMoments beta_moments(double p, double q) {
  const double s = p + q;
  BetaMoments b;
  b.mean = p / s;
  b.var = p * q / (s * s * (s + 1.0));
  b.skew = 2.0 * (q - p) * std::sqrt(s + 1.0) / ((s + 2.0) * std::sqrt(p * q));
  b.kurt = 3.0 + 6.0 * ((q - p) * (q - p) * (s + 1.0) - p * q * (s + 2.0)) /
                     (p * q * (s + 2.0) * (s + 3.0));
  return b;
}

BetaMoments beta_prime_moments(double p, double q) {
  BetaMoments b;
  b.mean = p / (q - 1.0);
  b.var = p * (p + q - 1.0) / ((q - 1.0) * (q - 1.0) * (q - 2.0));
  b.skew = 2.0 * std::sqrt((q - 2.0) / (p * (p + q - 1.0))) *
           (2.0 * p + q - 1.0) / (q - 3.0);
  b.kurt = 3.0 + 6.0 *
                     (p * (p + q - 1.0) * (5.0 * q - 11.0) +
                      (q - 1.0) * (q - 1.0) * (q - 2.0)) /
                     (p * (p + q - 1.0) * (q - 3.0) * (q - 4.0));
  return b;
}

BetaMoments inv_gamma_moments(double alpha) {
  // unit scale
  BetaMoments b;
  b.mean = 1.0 / (alpha - 1.0);
  b.var = 1.0 / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0));
  b.skew = 4.0 * std::sqrt(alpha - 2.0) / (alpha - 3.0);
  b.kurt = 3.0 + 6.0 * (5.0 * alpha - 11.0) / ((alpha - 3.0) * (alpha - 4.0));
  return b;
}

}  // namespace

TEST_CASE("normal moments route to the normal family") {
  const auto m = fit_pearson(5.0, 4.0, 0.0, 3.0);
  CHECK(m.family == PearsonFamily::kNormal);
  CHECK(near(m.param[0], 2.0));
  CHECK_FALSE(m.mirrored);
  check_convergence(m, 101);
}

TEST_CASE("uniform moments recover the symmetric bounded family") {
  // variance 1 and kurtosis 1.8 pin the uniform on [-sqrt(3), sqrt(3)]
  const auto m = fit_pearson(0.0, 1.0, 0.0, 1.8);
  CHECK(m.family == PearsonFamily::kTypeI);
  CHECK(near(m.param[2], 1.0));
  CHECK(near(m.param[3], 1.0));
  CHECK(near(m.mean + m.param[0], -std::sqrt(3.0)));
  CHECK(near(m.param[1], 2.0 * std::sqrt(3.0)));

  // one-sample KS against the exact uniform distribution function
  const double lo = -std::sqrt(3.0), w = 2.0 * std::sqrt(3.0);
  const double p = statutil::ks_one_sample_p(
      draw(m, 10000, 202), [&](double x) { return (x - lo) / w; });
  CHECK(p > 0.01);
  check_convergence(m, 203);
}

TEST_CASE("bounded fit recovers beta shape parameters") {
  const auto b = beta_moments(2.0, 5.0);
  const auto m = fit_pearson(b.mean, b.var, b.skew, b.kurt);
  CHECK(m.family == PearsonFamily::kTypeI);
  CHECK(near(m.param[2], 2.0, 1e-7));
  CHECK(near(m.param[3], 5.0, 1e-7));
  CHECK(std::abs(m.mean + m.param[0]) < 1e-9);        // support starts at 0
  CHECK(near(m.param[1], 1.0, 1e-7));                 // unit width
  check_convergence(m, 304);
}

TEST_CASE("gamma-line moments recover shape, scale and location") {
  // gamma with shape 4, scale 1.5, shifted to start at 2
  const double k = 4.0, theta = 1.5, loc = 2.0;
  const auto m = fit_pearson(loc + k * theta, k * theta * theta,
                             2.0 / std::sqrt(k), 3.0 + 6.0 / k);
  CHECK(m.family == PearsonFamily::kTypeIII);
  CHECK(near(m.param[2], k));
  CHECK(near(m.param[1], theta));
  CHECK(near(m.mean + m.param[0], loc));
  check_convergence(m, 405);
}

TEST_CASE("coincident-root moments recover the inverse gamma") {
  const auto g = inv_gamma_moments(6.0);
  const auto m = fit_pearson(g.mean, g.var, g.skew, g.kurt);
  CHECK(m.family == PearsonFamily::kTypeV);
  CHECK(near(m.param[2], 6.0, 1e-6));
  CHECK(near(m.param[1], 1.0, 1e-6));                 // unit scale
  CHECK(std::abs(m.mean + m.param[0]) < 1e-9);        // support starts at 0
}

TEST_CASE("inverse-gamma sampling converges on a tamer instance") {
  // alpha 12 keeps the eighth moment finite, so the sampled kurtosis is a
  // stable estimator
  const auto g = inv_gamma_moments(12.0);
  const auto m = fit_pearson(g.mean, g.var, g.skew, g.kurt);
  CHECK(m.family == PearsonFamily::kTypeV);
  check_convergence(m, 506);
}

TEST_CASE("beta-prime moments recover both shapes") {
  const auto b = beta_prime_moments(3.0, 6.0);
  const auto m = fit_pearson(b.mean, b.var, b.skew, b.kurt);
  CHECK(m.family == PearsonFamily::kTypeVI);
  CHECK(near(m.param[2], 3.0, 1e-6));
  CHECK(near(m.param[3], 6.0, 1e-6));
  CHECK(std::abs(m.mean + m.param[0]) < 1e-9);
  CHECK(near(m.param[1], 1.0, 1e-6));

  const auto tame = beta_prime_moments(3.0, 12.0);
  const auto m2 =
      fit_pearson(tame.mean, tame.var, tame.skew, tame.kurt);
  CHECK(m2.family == PearsonFamily::kTypeVI);
  check_convergence(m2, 607);
}

TEST_CASE("heavy symmetric tails route to the scaled t family") {
  const double nu = 11.0, s = 2.0;
  const auto m =
      fit_pearson(-3.0, s * s * nu / (nu - 2.0), 0.0, 3.0 + 6.0 / (nu - 4.0));
  CHECK(m.family == PearsonFamily::kTypeVII);
  CHECK(near(m.param[1], nu));
  CHECK(near(m.param[0], s));
  check_convergence(m, 708);
}

TEST_CASE("complex-root fit satisfies its mean and variance identities") {
  const auto m = fit_pearson(10.0, 4.0, 0.7, 4.2);
  CHECK(m.family == PearsonFamily::kTypeIV);
  const double a = m.param[0];
  const double nu = m.param[1];
  const double r = 2.0 * m.param[2] - 2.0;
  const double lambda = m.param[3];
  CHECK(near(lambda - a * nu / r, 10.0));
  CHECK(near(a * a * (r * r + nu * nu) / (r * r * (r - 1.0)), 4.0));
  check_convergence(m, 809);
}

TEST_CASE("negative skewness mirrors the fitted family") {
  const double k = 4.0;
  const auto m =
      fit_pearson(8.0, 9.0, -2.0 / std::sqrt(k), 3.0 + 6.0 / k);
  CHECK(m.family == PearsonFamily::kTypeIII);
  CHECK(m.mirrored);
  const auto mom = statutil::sample_moments(draw(m, 1000000, 910));
  CHECK(std::abs(mom.mean - 8.0) <= 0.02 * 8.0);
  CHECK(std::abs(mom.variance - 9.0) <= 0.02 * 9.0);
  CHECK(mom.skewness < -0.8);  // sign flipped, magnitude near 1
  CHECK(std::abs(mom.skewness + 1.0) <= 0.1);
}

TEST_CASE("infeasible moment pairs name the violated bound") {
  CHECK_THROWS_WITH_AS(fit_pearson(0.0, 1.0, 0.0, 1.0),
                       doctest::Contains("skewness^2 + 1"),
                       MomentRegionError);
  CHECK_THROWS_WITH_AS(fit_pearson(0.0, 1.0, 2.0, 4.0),
                       doctest::Contains("skewness^2 + 1"),
                       MomentRegionError);
  CHECK_THROWS_AS(fit_pearson(0.0, 0.0, 0.0, 3.0), MomentRegionError);
  CHECK_THROWS_AS(fit_pearson(0.0, -1.0, 0.0, 3.0), MomentRegionError);
  CHECK_THROWS_AS(
      fit_pearson(std::nan(""), 1.0, 0.0, 3.0), MomentRegionError);
}

TEST_CASE("box-muller normals pass a distribution test") {
  Rng rng(4242);
  std::vector<double> x(10000);
  for (auto& v : x) v = rng.normal();
  const double p = statutil::ks_one_sample_p(x, [](double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
  });
  CHECK(p > 0.01);
  const auto mom = statutil::sample_moments(x);
  CHECK(std::abs(mom.mean) < 0.05);
  CHECK(std::abs(mom.variance - 1.0) < 0.05);
}

TEST_CASE("gamma transform covers shapes below one") {
  Rng rng(777);
  std::vector<double> x(1000000);
  for (auto& v : x) v = rng.gamma(0.5);
  const auto mom = statutil::sample_moments(x);
  CHECK(std::abs(mom.mean - 0.5) <= 0.01);
  CHECK(std::abs(mom.variance - 0.5) <= 0.01);
  CHECK_THROWS_AS(rng.gamma(0.0), MomentRegionError);
}

TEST_CASE("empirical marginal interpolates the observed quantiles") {
  std::vector<double> data;
  for (int i = 1; i <= 100; ++i) data.push_back(static_cast<double>(i));
  const auto m = MarginalModel::empirical(data);
  CHECK(m.family == PearsonFamily::kEmpirical);
  CHECK(near(m.mean, 50.5));
  const auto x = draw(m, 100000, 1111);
  for (double v : x) {
    CHECK(v >= 1.0);
    CHECK(v <= 100.0);
  }
  const auto mom = statutil::sample_moments(x);
  CHECK(std::abs(mom.mean - 50.5) <= 0.02 * 50.5);
  CHECK_THROWS_AS(MarginalModel::empirical({}), MomentRegionError);
}

TEST_CASE("equal seeds reproduce the exact draw sequence") {
  const auto m = fit_pearson(10.0, 4.0, 0.7, 4.2);
  const auto a = draw(m, 500, 99);
  const auto b = draw(m, 500, 99);
  CHECK(a == b);
  const auto c = draw(m, 500, 100);
  CHECK(a != c);
}
