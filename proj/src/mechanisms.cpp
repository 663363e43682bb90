#include "privrec/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "privrec/quadrature.hpp"

namespace privrec {

namespace {

// Laplace(0, b) density and CDF.
inline double lap_pdf(double z, double b) {
  return 0.5 / b * std::exp(-std::fabs(z) / b);
}
inline double lap_cdf(double z, double b) {
  if (z < 0.0) return 0.5 * std::exp(z / b);
  return 1.0 - 0.5 * std::exp(-z / b);
}

// Candidates grouped by exact utility value, descending.
struct ValueGroups {
  std::vector<double> values;
  std::vector<std::uint64_t> counts;
};

ValueGroups group_by_value(const std::vector<double>& values) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  ValueGroups g;
  for (double v : sorted) {
    if (!g.values.empty() && g.values.back() == v) {
      ++g.counts.back();
    } else {
      g.values.push_back(v);
      g.counts.push_back(1);
    }
  }
  return g;
}

}  // namespace

void MechanismParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta_f > 0.0)) throw std::invalid_argument("delta_f must be > 0");
}

RecommendationDistribution exponential_distribution(const UtilityVector& uv,
                                                    const MechanismParams& p) {
  p.validate();
  if (uv.candidates.empty()) throw std::domain_error("empty candidate set");
  if (std::fabs(uv.sensitivity - p.delta_f) >
      1e-9 * std::max(1.0, p.delta_f)) {
    throw std::invalid_argument(
        "utility sensitivity inconsistent with params.delta_f");
  }
  RecommendationDistribution dist;
  dist.candidates = uv.candidates;
  dist.probabilities.resize(uv.values.size());
  const double scale = p.epsilon / p.delta_f;
  double total = 0.0;
  for (std::size_t i = 0; i < uv.values.size(); ++i) {
    const double w = std::exp(scale * (uv.values[i] - uv.u_max));
    dist.probabilities[i] = w;
    total += w;
  }
  for (double& pr : dist.probabilities) pr /= total;
  return dist;
}

double exponential_expected_accuracy(const UtilityVector& uv, double epsilon,
                                     double delta_f) {
  if (!(uv.u_max > 0.0)) throw std::domain_error("u_max must be positive");
  const double scale = epsilon / delta_f;
  double weight_sum = 0.0, utility_sum = 0.0;
  for (double u : uv.values) {
    const double w = std::exp(scale * (u - uv.u_max));
    weight_sum += w;
    utility_sum += u * w;
  }
  return utility_sum / weight_sum / uv.u_max;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::domain_error("alias table needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("all-zero weights");
  threshold_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
  }
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    threshold_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t i : large) {
    threshold_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::uint32_t i : small) {  // numerical leftovers
    threshold_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::sample(SplitMix64& rng) const {
  const std::size_t i = rng.next_below(threshold_.size());
  return rng.next_unit_open() < threshold_[i] ? i : alias_[i];
}

NodeId sample(const RecommendationDistribution& dist, SplitMix64& rng) {
  const AliasTable table(dist.probabilities);
  return dist.candidates[table.sample(rng)];
}

NodeId laplace_recommend_naive(const UtilityVector& uv,
                               const MechanismParams& p, SplitMix64& rng) {
  p.validate();
  if (uv.candidates.empty()) throw std::domain_error("empty candidate set");
  const double b = p.delta_f / p.epsilon;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < uv.values.size(); ++i) {
    const double noisy = uv.values[i] + laplace_inv_cdf(rng.next_unit_open(), b);
    if (noisy > best) {  // strict: ties keep the smallest candidate id
      best = noisy;
      best_idx = i;
    }
  }
  return uv.candidates[best_idx];
}

NodeId laplace_recommend(const UtilityVector& uv, const MechanismParams& p,
                         SplitMix64& rng) {
  p.validate();
  if (uv.candidates.empty()) throw std::domain_error("empty candidate set");
  const double b = p.delta_f / p.epsilon;
  const ValueGroups groups = group_by_value(uv.values);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_group = 0;
  for (std::size_t gi = 0; gi < groups.values.size(); ++gi) {
    const double noisy =
        groups.values[gi] +
        laplace_max_inv_cdf(rng.next_unit_open(), b, groups.counts[gi]);
    if (noisy > best) {
      best = noisy;
      best_group = gi;
    }
  }
  // Uniform member of the winning group (the group maximum is exchangeable).
  const double win_value = groups.values[best_group];
  std::uint64_t member = rng.next_below(groups.counts[best_group]);
  for (std::size_t i = 0; i < uv.values.size(); ++i) {
    if (uv.values[i] == win_value) {
      if (member == 0) return uv.candidates[i];
      --member;
    }
  }
  throw std::logic_error("winning group member not found");
}

double laplace_winner_utility(const std::vector<double>& group_values,
                              const std::vector<std::uint64_t>& group_counts,
                              double noise_scale, SplitMix64& rng) {
  double best = -std::numeric_limits<double>::infinity();
  double best_value = 0.0;
  for (std::size_t gi = 0; gi < group_values.size(); ++gi) {
    const double noisy =
        group_values[gi] +
        laplace_max_inv_cdf(rng.next_unit_open(), noise_scale, group_counts[gi]);
    if (noisy > best) {
      best = noisy;
      best_value = group_values[gi];
    }
  }
  return best_value;
}

double laplace_mc_accuracy(const UtilityVector& uv, const MechanismParams& p,
                           int trials, double* stderr_out) {
  p.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(uv.u_max > 0.0)) throw std::domain_error("u_max must be positive");
  const double b = p.delta_f / p.epsilon;
  const ValueGroups groups = group_by_value(uv.values);
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng(derive_seed(p.seed, uv.target, static_cast<std::uint64_t>(t)));
    const double win =
        laplace_winner_utility(groups.values, groups.counts, b, rng);
    const double acc = win / uv.u_max;
    sum += acc;
    sum_sq += acc * acc;
  }
  const double mean = sum / trials;
  if (stderr_out) {
    if (trials == 1) {
      *stderr_out = 0.0;
    } else {
      const double var =
          std::max(0.0, (sum_sq - trials * mean * mean) / (trials - 1));
      *stderr_out = std::sqrt(var / trials);
    }
  }
  return mean;
}

double laplace_two_node_win_prob(double u1, double u2, double epsilon) {
  if (u1 < u2) throw std::invalid_argument("requires u1 >= u2 (caller swaps)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double d = u1 - u2;
  return 1.0 - std::exp(-epsilon * d) * (0.5 + epsilon * d / 4.0);
}

RecommendationDistribution laplace_selection_probabilities(
    const UtilityVector& uv, const MechanismParams& p, double tol) {
  p.validate();
  const std::size_t n = uv.candidates.size();
  if (n == 0) throw std::domain_error("empty candidate set");
  if (n > 64) throw std::length_error("quadrature oracle capped at 64 candidates");
  RecommendationDistribution dist;
  dist.candidates = uv.candidates;
  dist.probabilities.resize(n);
  if (n == 1) {
    dist.probabilities[0] = 1.0;
    return dist;
  }
  const double b = p.delta_f / p.epsilon;
  const auto [mn_it, mx_it] =
      std::minmax_element(uv.values.begin(), uv.values.end());
  const double lo = *mn_it - 20.0 * b;
  const double hi = *mx_it + 20.0 * b;
  // Integrand derivative kinks where y crosses any utility value.
  const std::vector<double> breaks(uv.values.begin(), uv.values.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto integrand = [&](double y) {
      double val = lap_pdf(y - uv.values[i], b);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) val *= lap_cdf(y - uv.values[j], b);
      }
      return val;
    };
    dist.probabilities[i] =
        adaptive_simpson_piecewise(integrand, lo, hi, breaks, tol);
  }
  return dist;
}

RecommendationDistribution linear_smoothing(
    const RecommendationDistribution& dist, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("x must lie in [0, 1]");
  const double n = static_cast<double>(dist.candidates.size());
  if (n == 0.0) throw std::domain_error("empty distribution");
  RecommendationDistribution out;
  out.candidates = dist.candidates;
  out.probabilities.resize(dist.probabilities.size());
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    out.probabilities[i] = (1.0 - x) / n + x * dist.probabilities[i];
  }
  return out;
}

double smoothing_privacy(double x, std::uint64_t n) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("x must lie in [0, 1]");
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (x == 1.0) return std::numeric_limits<double>::infinity();
  return std::log1p(static_cast<double>(n) * x / (1.0 - x));
}

double smoothing_param_for_privacy(double c, std::uint64_t n) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be > 0");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  // n^{2c} - 1 via expm1 keeps precision for small c.
  const double num = std::expm1(2.0 * c * std::log(static_cast<double>(n)));
  return num / (num + static_cast<double>(n));
}

double expected_accuracy(const RecommendationDistribution& dist,
                         const UtilityVector& uv) {
  if (dist.candidates.size() != uv.candidates.size()) {
    throw std::invalid_argument("distribution/utility size mismatch");
  }
  if (!(uv.u_max > 0.0)) throw std::domain_error("u_max must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < uv.values.size(); ++i) {
    total += uv.values[i] * dist.probabilities[i];
  }
  return total / uv.u_max;
}

}  // namespace privrec
