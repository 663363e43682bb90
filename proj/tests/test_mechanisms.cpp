#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "privrec/mechanisms.hpp"
#include "privrec/rng.hpp"
#include "test_util.hpp"

namespace {

using privrec::MechanismParams;
using privrec::RecommendationDistribution;
using privrec::SplitMix64;
using privrec::UtilityVector;

UtilityVector make_uv(std::vector<double> values, double sensitivity = 1.0) {
  UtilityVector uv;
  for (std::size_t i = 0; i < values.size(); ++i) {
    uv.candidates.push_back(static_cast<privrec::NodeId>(i));
  }
  uv.values = std::move(values);
  uv.sensitivity = sensitivity;
  uv.recompute_u_max();
  return uv;
}

MechanismParams params(double epsilon, std::uint64_t seed = 0) {
  MechanismParams p;
  p.epsilon = epsilon;
  p.delta_f = 1.0;
  p.seed = seed;
  return p;
}

TEST(MechanismParams, Validation) {
  EXPECT_NO_THROW(params(0.5).validate());
  EXPECT_THROW(params(0.0).validate(), std::invalid_argument);
  MechanismParams bad = params(1.0);
  bad.delta_f = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Exponential, UniformUtilitiesGiveUniformDistribution) {
  const auto uv = make_uv({2.0, 2.0, 2.0, 2.0, 2.0});
  const auto dist = privrec::exponential_distribution(uv, params(0.7));
  for (double p : dist.probabilities) EXPECT_NEAR(p, 0.2, 1e-15);
}

TEST(Exponential, TwoNodeClosedForm) {
  const auto uv = make_uv({1.0, 0.0});
  const auto dist = privrec::exponential_distribution(uv, params(1.0));
  const double e = std::exp(1.0);
  EXPECT_NEAR(dist.probabilities[0], e / (e + 1.0), 1e-12);
  EXPECT_NEAR(dist.probabilities[1], 1.0 / (e + 1.0), 1e-12);
}

TEST(Exponential, MatchesIndependentSoftmaxOracle) {
  // Independent one-line softmax in long double, no max shift.
  const std::vector<double> u = {3.0, 1.0, 0.0, 0.0};
  const double eps = 0.5;
  long double z = 0.0L;
  for (double ui : u) z += std::exp(static_cast<long double>(eps) * ui);
  const auto dist = privrec::exponential_distribution(make_uv(u), params(eps));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const long double expect = std::exp(static_cast<long double>(eps) * u[i]) / z;
    EXPECT_NEAR(dist.probabilities[i], static_cast<double>(expect), 1e-12);
  }
}

TEST(Exponential, MonotoneAndNormalizedOnRandomInstances) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> u;
    const int n = 2 + static_cast<int>(rng.next_below(10));
    for (int i = 0; i < n; ++i) u.push_back(rng.next_below(6) * 0.5);
    const auto uv = make_uv(u);
    if (uv.u_max == 0.0) continue;
    const auto dist =
        privrec::exponential_distribution(uv, params(0.1 + rng.next_unit_open()));
    double sum = 0.0;
    for (double p : dist.probabilities) {
      ASSERT_GE(p, 0.0);
      sum += p;
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (u[i] >= u[j]) {
          ASSERT_GE(dist.probabilities[i], dist.probabilities[j] - 1e-15);
        }
      }
    }
  }
}

TEST(Exponential, LargeEpsilonConcentratesOnArgmax) {
  const auto uv = make_uv({1.0, 0.0, 0.0, 0.0, 0.0});
  const double acc = privrec::exponential_expected_accuracy(uv, 50.0, 1.0);
  EXPECT_NEAR(acc, 1.0, 1e-3);
  EXPECT_NEAR(acc, 1.0, 1e-12);  // actually far tighter
}

TEST(Exponential, ExpectedAccuracyMatchesDotProduct) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> u;
    const int n = 2 + static_cast<int>(rng.next_below(12));
    for (int i = 0; i < n; ++i) u.push_back(rng.next_unit_open() * 4.0);
    const auto uv = make_uv(u);
    const double eps = 0.05 + rng.next_unit_open();
    const auto dist = privrec::exponential_distribution(uv, params(eps));
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      dot += u[i] * dist.probabilities[i];
    }
    EXPECT_NEAR(privrec::exponential_expected_accuracy(uv, eps, 1.0),
                dot / uv.u_max, 1e-12);
    EXPECT_NEAR(privrec::expected_accuracy(dist, uv), dot / uv.u_max, 1e-12);
  }
}

TEST(Exponential, SensitivityParamConsistencyEnforced) {
  const auto uv = make_uv({1.0, 0.0}, /*sensitivity=*/2.0);
  EXPECT_THROW(privrec::exponential_distribution(uv, params(1.0)),
               std::invalid_argument);
  UtilityVector empty;
  EXPECT_THROW(privrec::exponential_distribution(empty, params(1.0)),
               std::domain_error);
}

TEST(Sampling, PointMassAlwaysWins) {
  RecommendationDistribution dist;
  dist.candidates = {2, 5, 9};
  dist.probabilities = {0.0, 1.0, 0.0};
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(privrec::sample(dist, rng), 5u);
  }
}

TEST(Sampling, UniformFrequenciesWithinFourSigma) {
  RecommendationDistribution dist;
  dist.candidates = {0, 1, 2, 3};
  dist.probabilities = {0.25, 0.25, 0.25, 0.25};
  SplitMix64 rng(42);
  const int trials = 1000000;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < trials; ++i) ++counts[privrec::sample(dist, rng)];
  const double sd = std::sqrt(0.25 * 0.75 * trials);
  for (int c : counts) EXPECT_NEAR(c, 0.25 * trials, 4 * sd);
}

TEST(Sampling, MatchesSoftmaxProbabilitiesWithinFourSigma) {
  const auto uv = make_uv({3.0, 1.0, 0.0, 0.0});
  const auto dist = privrec::exponential_distribution(uv, params(0.5));
  SplitMix64 rng(7);
  const int trials = 1000000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < trials; ++i) {
    const auto winner = privrec::sample(dist, rng);
    ++counts[winner];
  }
  for (int i = 0; i < 4; ++i) {
    const double p = dist.probabilities[i];
    const double sd = std::sqrt(p * (1 - p) * trials);
    EXPECT_NEAR(counts[i], p * trials, 4 * sd) << "i=" << i;
  }
}

TEST(Sampling, AliasTableRejectsBadWeights) {
  EXPECT_THROW(privrec::AliasTable({}), std::domain_error);
  EXPECT_THROW(privrec::AliasTable({1.0, -0.5}), std::invalid_argument);
  EXPECT_THROW(privrec::AliasTable({0.0, 0.0}), std::invalid_argument);
  // Zero-weight entries are never drawn.
  privrec::AliasTable table({0.0, 2.0, 0.0, 1.0});
  SplitMix64 rng(9);
  for (int i = 0; i < 20000; ++i) {
    const auto s = table.sample(rng);
    ASSERT_TRUE(s == 1 || s == 3);
  }
}

TEST(Laplace, SingleCandidateTrivial) {
  const auto uv = make_uv({0.7});
  SplitMix64 rng(3);
  EXPECT_EQ(privrec::laplace_recommend_naive(uv, params(1.0), rng), 0u);
  EXPECT_EQ(privrec::laplace_recommend(uv, params(1.0), rng), 0u);
}

TEST(Laplace, GroupedFastPathMatchesNaivePathStatistically) {
  // u = (2, 0, ..., 0) with 30 zeros: the fast path draws the zero group's
  // max in one shot; win rates of candidate 0 must agree with each other and
  // with the quadrature oracle.
  std::vector<double> u(31, 0.0);
  u[0] = 2.0;
  const auto uv = make_uv(u);
  const auto p = params(0.8);
  const double p_true =
      privrec::laplace_selection_probabilities(uv, p).probabilities[0];

  const int trials = 200000;
  int wins_naive = 0, wins_fast = 0;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng_a(privrec::derive_seed(111, 0, t));
    SplitMix64 rng_b(privrec::derive_seed(222, 0, t));
    wins_naive += privrec::laplace_recommend_naive(uv, p, rng_a) == 0;
    wins_fast += privrec::laplace_recommend(uv, p, rng_b) == 0;
  }
  const double sd = std::sqrt(p_true * (1 - p_true) / trials);
  EXPECT_NEAR(wins_naive / static_cast<double>(trials), p_true, 4 * sd);
  EXPECT_NEAR(wins_fast / static_cast<double>(trials), p_true, 4 * sd);
  // Two-sample difference: sd of the difference is sqrt(2) * sd.
  EXPECT_NEAR(wins_naive / static_cast<double>(trials),
              wins_fast / static_cast<double>(trials), 4 * std::sqrt(2.0) * sd);
}

TEST(Laplace, AllTiedUtilitiesPickUniformMember) {
  const auto uv = make_uv({1.0, 1.0, 1.0, 1.0});
  const auto p = params(0.5);
  std::vector<int> counts(4, 0);
  for (int t = 0; t < 100000; ++t) {
    SplitMix64 rng(privrec::derive_seed(5, 0, t));
    ++counts[privrec::laplace_recommend(uv, p, rng)];
  }
  const double sd = std::sqrt(0.25 * 0.75 * 100000);
  for (int c : counts) EXPECT_NEAR(c, 25000.0, 4 * sd);
}

TEST(LaplaceTwoNode, SymmetryLimitsAndMonotonicity) {
  EXPECT_DOUBLE_EQ(privrec::laplace_two_node_win_prob(3.0, 3.0, 1.0), 0.5);
  EXPECT_NEAR(privrec::laplace_two_node_win_prob(50.0, 0.0, 1.0), 1.0, 1e-12);
  double prev = 0.4;
  for (double d = 0.0; d <= 6.0; d += 0.25) {
    const double p = privrec::laplace_two_node_win_prob(d, 0.0, 0.7);
    EXPECT_GE(p, prev - 1e-15);
    EXPECT_GE(p, 0.5 - 1e-15);
    EXPECT_LE(p, 1.0 + 1e-15);
    prev = p;
  }
  EXPECT_THROW(privrec::laplace_two_node_win_prob(0.0, 1.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(privrec::laplace_two_node_win_prob(1.0, 0.0, 0.0),
               std::invalid_argument);
}

TEST(LaplaceTwoNode, MatchesIndependentMonteCarloOracle) {
  // Fully independent oracle: std::mt19937_64 + inverse-CDF Laplace draws.
  const double eps = 0.5, d = 2.0;
  const double closed = privrec::laplace_two_node_win_prob(d, 0.0, eps);
  std::mt19937_64 gen(20240817);
  std::uniform_real_distribution<double> unif(
      std::numeric_limits<double>::min(), 1.0);
  const double scale = 1.0 / eps;
  const int trials = 1000000;
  int wins = 0;
  const auto lap = [&]() {
    const double u = unif(gen) - 0.5;
    return -scale * std::copysign(std::log1p(-2.0 * std::fabs(u)), u);
  };
  for (int t = 0; t < trials; ++t) {
    if (d + lap() >= lap()) ++wins;
  }
  const double sd = std::sqrt(closed * (1 - closed) / trials);
  EXPECT_NEAR(wins / static_cast<double>(trials), closed, 4 * sd);
}

TEST(LaplaceOracle, TwoCandidateAgreesWithClosedForm) {
  const auto uv = make_uv({3.0, 1.0});
  const auto dist = privrec::laplace_selection_probabilities(uv, params(1.0));
  EXPECT_NEAR(dist.probabilities[0],
              privrec::laplace_two_node_win_prob(3.0, 1.0, 1.0), 1e-6);
  EXPECT_NEAR(dist.probabilities[0] + dist.probabilities[1], 1.0, 1e-6);
}

TEST(LaplaceOracle, UniformUtilitiesSplitEvenly) {
  const auto uv = make_uv({2.0, 2.0, 2.0});
  const auto dist = privrec::laplace_selection_probabilities(uv, params(0.7));
  for (double p : dist.probabilities) EXPECT_NEAR(p, 1.0 / 3.0, 1e-6);
}

TEST(LaplaceOracle, FourCandidatesMatchMonteCarlo) {
  const std::vector<double> u = {2.5, 2.0, 0.5, 0.0};
  const double eps = 0.6;
  const auto dist =
      privrec::laplace_selection_probabilities(make_uv(u), params(eps));
  double sum = 0.0;
  for (double p : dist.probabilities) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-6);

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unif(
      std::numeric_limits<double>::min(), 1.0);
  const double scale = 1.0 / eps;
  const auto lap = [&]() {
    const double v = unif(gen) - 0.5;
    return -scale * std::copysign(std::log1p(-2.0 * std::fabs(v)), v);
  };
  const int trials = 1000000;
  std::vector<int> counts(4, 0);
  for (int t = 0; t < trials; ++t) {
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      const double noisy = u[i] + lap();
      if (noisy > best_val) {
        best_val = noisy;
        best = i;
      }
    }
    ++counts[best];
  }
  for (int i = 0; i < 4; ++i) {
    const double p = dist.probabilities[i];
    const double sd = std::sqrt(p * (1 - p) / trials);
    EXPECT_NEAR(counts[i] / static_cast<double>(trials), p, 4 * sd) << i;
  }
}

TEST(LaplaceOracle, MonotoneInUtility) {
  const std::vector<double> u = {4.0, 2.0, 2.0, 1.0, 0.0};
  const auto dist =
      privrec::laplace_selection_probabilities(make_uv(u), params(0.5));
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    EXPECT_GE(dist.probabilities[i], dist.probabilities[i + 1] - 1e-9);
  }
  EXPECT_NEAR(dist.probabilities[1], dist.probabilities[2], 1e-8);
}

TEST(LaplaceOracle, CapacityLimit) {
  std::vector<double> u(65, 0.0);
  u[0] = 1.0;
  EXPECT_THROW(
      privrec::laplace_selection_probabilities(make_uv(u), params(1.0)),
      std::length_error);
  UtilityVector empty;
  EXPECT_THROW(privrec::laplace_selection_probabilities(empty, params(1.0)),
               std::domain_error);
}

TEST(LaplaceMc, AgreesWithClosedFormWithinFourStandardErrors) {
  const auto uv = make_uv({5.0, 0.0});
  const double closed = privrec::laplace_two_node_win_prob(5.0, 0.0, 1.0);
  double se = 0.0;
  const double acc = privrec::laplace_mc_accuracy(uv, params(1.0, 321), 40000, &se);
  // Accuracy = P[win] * 5/5 + (1 - P[win]) * 0.
  EXPECT_NEAR(acc, closed, 4 * se + 1e-12);
  EXPECT_LE(se, 0.5 / std::sqrt(40000.0) + 1e-12);
}

TEST(LaplaceMc, DeterministicGivenSeedAndTrialCount) {
  const auto uv = make_uv({2.0, 1.0, 0.0, 0.0, 0.0});
  double se1 = 0.0, se2 = 0.0;
  const double a = privrec::laplace_mc_accuracy(uv, params(0.3, 9), 5000, &se1);
  const double b = privrec::laplace_mc_accuracy(uv, params(0.3, 9), 5000, &se2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(se1, se2);
  const double c = privrec::laplace_mc_accuracy(uv, params(0.3, 10), 5000, &se2);
  EXPECT_NE(a, c);  // different seed, different stream
  double se_one = -1.0;
  privrec::laplace_mc_accuracy(uv, params(0.3, 9), 1, &se_one);
  EXPECT_EQ(se_one, 0.0);
}

TEST(Smoothing, EndpointsAndHandExample) {
  RecommendationDistribution base;
  base.candidates = {0, 1};
  base.probabilities = {1.0, 0.0};
  const auto at0 = privrec::linear_smoothing(base, 0.0);
  EXPECT_DOUBLE_EQ(at0.probabilities[0], 0.5);
  EXPECT_DOUBLE_EQ(at0.probabilities[1], 0.5);
  const auto at1 = privrec::linear_smoothing(base, 1.0);
  EXPECT_DOUBLE_EQ(at1.probabilities[0], 1.0);
  const auto mid = privrec::linear_smoothing(base, 0.5);
  EXPECT_DOUBLE_EQ(mid.probabilities[0], 0.75);
  EXPECT_DOUBLE_EQ(mid.probabilities[1], 0.25);
  EXPECT_THROW(privrec::linear_smoothing(base, -0.1), std::domain_error);
  EXPECT_THROW(privrec::linear_smoothing(base, 1.1), std::domain_error);
}

TEST(Smoothing, RangeAndArgmaxInvariants) {
  SplitMix64 rng(88);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(8));
    std::vector<double> u;
    for (int i = 0; i < n; ++i) u.push_back(rng.next_unit_open() * 3.0);
    const auto uv = make_uv(u);
    const auto base = privrec::exponential_distribution(uv, params(0.8));
    const double x = rng.next_unit_open() * 0.98;
    const auto smoothed = privrec::linear_smoothing(base, x);
    const double lo = (1.0 - x) / n;
    double sum = 0.0;
    for (double p : smoothed.probabilities) {
      ASSERT_GE(p, lo - 1e-15);
      ASSERT_LE(p, lo + x + 1e-15);
      sum += p;
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);
    const auto base_arg = std::max_element(base.probabilities.begin(),
                                           base.probabilities.end()) -
                          base.probabilities.begin();
    const auto smooth_arg = std::max_element(smoothed.probabilities.begin(),
                                             smoothed.probabilities.end()) -
                            smoothed.probabilities.begin();
    if (x > 0.0) {
      ASSERT_EQ(base_arg, smooth_arg);
    }
  }
}

TEST(Smoothing, PrivacyFormula) {
  EXPECT_DOUBLE_EQ(privrec::smoothing_privacy(0.0, 5), 0.0);
  EXPECT_NEAR(privrec::smoothing_privacy(0.5, 10), std::log(11.0), 1e-12);
  EXPECT_TRUE(std::isinf(privrec::smoothing_privacy(1.0, 3)));
  EXPECT_THROW(privrec::smoothing_privacy(-0.1, 3), std::domain_error);
  EXPECT_THROW(privrec::smoothing_privacy(1.5, 3), std::domain_error);
  EXPECT_THROW(privrec::smoothing_privacy(0.5, 0), std::domain_error);
}

TEST(Smoothing, ParamForPrivacyHandValueAndRoundTrip) {
  // n = 10, c = 0.5: n^{2c} = 10, x = 9/19.
  EXPECT_NEAR(privrec::smoothing_param_for_privacy(0.5, 10), 9.0 / 19.0, 1e-12);
  // Round trip: ln(1 + n x/(1-x)) = 2 c ln n.
  for (std::uint64_t n : {2ull, 5ull, 10ull, 50ull, 1000ull}) {
    for (double c : {0.1, 0.3, 0.5, 0.8, 1.0}) {
      const double x = privrec::smoothing_param_for_privacy(c, n);
      ASSERT_GT(x, 0.0);
      ASSERT_LT(x, 1.0);
      EXPECT_NEAR(privrec::smoothing_privacy(x, n), 2.0 * c * std::log(n), 1e-9)
          << "n=" << n << " c=" << c;
    }
  }
  // c -> 0 drives x -> 0.
  EXPECT_LT(privrec::smoothing_param_for_privacy(1e-12, 10), 1e-10);
  EXPECT_THROW(privrec::smoothing_param_for_privacy(0.0, 10),
               std::invalid_argument);
  EXPECT_THROW(privrec::smoothing_param_for_privacy(0.5, 1),
               std::invalid_argument);
}

TEST(Smoothing, UtilityFloorOnNormalizedInstances) {
  // Utility floor: with sum-normalized utilities and the exponential
  // mechanism as base achieving expected utility gamma_base, the smoothed
  // mechanism achieves >= x * gamma_base (the non-uniform term keeps weight
  // x, and the uniform term's contribution is nonnegative).
  SplitMix64 rng(515);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(7));
    std::vector<double> u;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      u.push_back(rng.next_unit_open());
      total += u.back();
    }
    for (double& v : u) v /= total;  // sum-normalize
    const auto uv = make_uv(u);
    const auto base = privrec::exponential_distribution(uv, params(1.2));
    double gamma_base = 0.0;
    for (int i = 0; i < n; ++i) gamma_base += u[i] * base.probabilities[i];
    const double x = rng.next_unit_open();
    const auto smoothed = privrec::linear_smoothing(base, x);
    double got = 0.0;
    for (int i = 0; i < n; ++i) got += u[i] * smoothed.probabilities[i];
    ASSERT_GE(got, x * gamma_base - 1e-9);
  }
}

TEST(ExpectedAccuracy, ExamplesAndErrors) {
  const auto uv = make_uv({1.0, 0.0, 0.0, 0.0});
  RecommendationDistribution point;
  point.candidates = uv.candidates;
  point.probabilities = {1.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(privrec::expected_accuracy(point, uv), 1.0);
  RecommendationDistribution uniform;
  uniform.candidates = uv.candidates;
  uniform.probabilities = {0.25, 0.25, 0.25, 0.25};
  EXPECT_DOUBLE_EQ(privrec::expected_accuracy(uniform, uv), 0.25);

  const auto zero = make_uv({0.0, 0.0});
  RecommendationDistribution d2;
  d2.candidates = zero.candidates;
  d2.probabilities = {0.5, 0.5};
  EXPECT_THROW(privrec::expected_accuracy(d2, zero), std::domain_error);
  RecommendationDistribution wrong;
  wrong.candidates = {0};
  wrong.probabilities = {1.0};
  EXPECT_THROW(privrec::expected_accuracy(wrong, uv), std::invalid_argument);
}

}  // namespace
