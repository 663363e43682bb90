// The three private selection mechanisms (exponential, Laplace
// report-noisy-max, linear smoothing), exact selection-probability oracles,
// and the two-candidate closed form.
#pragma once

#include <cstdint>
#include <vector>

#include "privrec/rng.hpp"
#include "privrec/utility.hpp"

namespace privrec {

struct MechanismParams {
  double epsilon = 1.0;   // privacy parameter, > 0
  double delta_f = 1.0;   // sensitivity, > 0 (1 after scaling)
  std::uint64_t seed = 0;

  void validate() const;
};

struct RecommendationDistribution {
  std::vector<NodeId> candidates;
  std::vector<double> probabilities;  // nonnegative, sums to 1
};

// p_i proportional to exp(epsilon * u_i / delta_f), max-shifted for stability.
RecommendationDistribution exponential_distribution(const UtilityVector& uv,
                                                    const MechanismParams& p);

// Exact expected accuracy of the exponential mechanism,
// sum_i u_i p_i / u_max, without materializing the distribution.
double exponential_expected_accuracy(const UtilityVector& uv, double epsilon,
                                     double delta_f = 1.0);

// O(1)-per-draw discrete sampler (Walker/Vose alias method).
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t sample(SplitMix64& rng) const;

 private:
  std::vector<double> threshold_;
  std::vector<std::uint32_t> alias_;
};

// Draws one candidate from the distribution.
NodeId sample(const RecommendationDistribution& dist, SplitMix64& rng);

// Report-noisy-max: independent Laplace(delta_f / epsilon) noise on every
// utility, return the argmax; ties (probability zero) break to the smallest
// candidate id.  Reference path drawing one noise value per candidate.
NodeId laplace_recommend_naive(const UtilityVector& uv,
                               const MechanismParams& p, SplitMix64& rng);

// Fast path: candidates grouped by utility value; each group's noisy maximum
// is drawn in one shot through the max-of-k inverse CDF, then a uniform group
// member is picked.  Distributionally identical to the naive path.
NodeId laplace_recommend(const UtilityVector& uv, const MechanismParams& p,
                         SplitMix64& rng);

// Utility value (not identity) of the report-noisy-max winner; all the
// harness needs for accuracy estimates, so the member pick is skipped.
double laplace_winner_utility(const std::vector<double>& group_values,
                              const std::vector<std::uint64_t>& group_counts,
                              double noise_scale, SplitMix64& rng);

// Monte Carlo expected accuracy of report-noisy-max over `trials` runs using
// the grouped fast path; writes the standard error of the mean.
double laplace_mc_accuracy(const UtilityVector& uv, const MechanismParams& p,
                           int trials, double* stderr_out);

// Closed form for two candidates with unit sensitivity:
// P[candidate 1 wins] = 1 - e^{-eps d} (1/2 + eps d / 4), d = u1 - u2 >= 0.
double laplace_two_node_win_prob(double u1, double u2, double epsilon);

// Exact selection probabilities of report-noisy-max via adaptive quadrature of
// p_i = integral f(y - u_i) prod_{j != i} F(y - u_j) dy.  Capacity-limited to
// 64 candidates (audit/test oracle, not a production path).
RecommendationDistribution laplace_selection_probabilities(
    const UtilityVector& uv, const MechanismParams& p, double tol = 1e-9);

// p''_i = (1 - x)/n + x p_i.
RecommendationDistribution linear_smoothing(
    const RecommendationDistribution& dist, double x);

// Privacy cost of A_S(x): ln(1 + n x / (1 - x)); +infinity at x = 1.
double smoothing_privacy(double x, std::uint64_t n);

// x achieving 2*eps-DP for eps = c ln n:  x = (n^{2c} - 1)/(n^{2c} - 1 + n).
double smoothing_param_for_privacy(double c, std::uint64_t n);

// sum_i u_i p_i / u_max.  Throws std::domain_error when u_max = 0.
double expected_accuracy(const RecommendationDistribution& dist,
                         const UtilityVector& uv);

}  // namespace privrec
