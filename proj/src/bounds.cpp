#include "privrec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace privrec {

double accuracy_upper_bound(std::uint64_t n, std::uint64_t k, double t,
                            double c, double epsilon) {
  if (k > n) throw std::invalid_argument("k must not exceed n");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("c must lie in (0, 1]");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (n == k) return 1.0;  // no low-utility group; bound is vacuous
  const double low = static_cast<double>(n - k);
  const double value =
      1.0 - c * low / (low + static_cast<double>(k + 1) * std::exp(epsilon * t));
  return std::clamp(value, 0.0, 1.0);
}

double epsilon_lower_bound(std::uint64_t n, std::uint64_t k, double t, double c,
                           double delta) {
  if (k > n) throw std::invalid_argument("k must not exceed n");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("c must lie in (0, 1]");
  if (!(delta > 0.0 && delta < c)) {
    throw std::domain_error("requires 0 < delta < c");
  }
  if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
  return (std::log((c - delta) / delta) +
          std::log(static_cast<double>(n - k) / static_cast<double>(k + 1))) /
         t;
}

double epsilon_lower_bound_concentration(std::uint64_t n, double beta,
                                         double t) {
  if (n < 3) throw std::invalid_argument("n must be >= 3");
  if (!(beta >= 1.0)) throw std::invalid_argument("beta must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
  const double ln_n = std::log(static_cast<double>(n));
  return (ln_n - std::log(beta) - std::log(ln_n)) / t;
}

std::uint32_t t_generic(const Graph& g) {
  if (g.node_count() == 0) throw std::domain_error("empty graph");
  return 4 * g.max_degree();
}

std::uint32_t t_common_neighbors(const Graph& g, NodeId r) {
  return g.degree(r) + 2;
}

WeightedPathsT t_weighted_paths(const Graph& g, NodeId r, double gamma) {
  const double gd = gamma * static_cast<double>(g.max_degree());
  if (!(gd < 1.0)) throw std::domain_error("requires gamma * d_max < 1");
  const double s = gd / (1.0 - gd);
  WeightedPathsT out;
  if (1.0 - 8.0 * s < 0.0) return out;  // infeasible; caller uses t_generic
  out.feasible = true;
  // Smallest c >= 1 with g(c) = (c - 1) - s (c + 1)^2 >= 0.  g(1) = -4s < 0
  // and g is concave, so bisection between 1 and the first point where
  // g >= 0 (found by doubling) lands on the smaller root.
  const auto goal = [s](double c) { return (c - 1.0) - s * (c + 1.0) * (c + 1.0); };
  double lo = 1.0, hi = 2.0;
  while (goal(hi) < 0.0) {
    hi = 1.0 + 2.0 * (hi - 1.0);
    if (hi > 1e9) {  // s == 0 never enters (g(c) = c-1 >= 0 at c = 1)
      return WeightedPathsT{};
    }
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-9; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (goal(mid) < 0.0 ? lo : hi) = mid;
  }
  out.c = hi;
  const double d_r = static_cast<double>(g.degree(r));
  out.t = static_cast<std::uint32_t>(std::ceil(d_r + 2.0 * (out.c - 1.0) * d_r));
  return out;
}

NodeBound node_accuracy_ceiling(const UtilityVector& uv, std::uint32_t t,
                                double epsilon,
                                const std::vector<double>& c_grid) {
  if (!(uv.u_max > 0.0)) throw std::domain_error("u_max must be positive");
  if (c_grid.empty()) throw std::invalid_argument("empty c grid");
  NodeBound best;
  best.target = uv.target;
  best.t_used = t;
  bool first = true;
  for (double c : c_grid) {
    std::uint64_t k = 0;
    const double threshold = (1.0 - c) * uv.u_max;
    for (double u : uv.values) {
      if (u > threshold) ++k;
    }
    const double ceiling =
        accuracy_upper_bound(uv.candidates.size(), k, t, c, epsilon);
    if (first || ceiling < best.ceiling) {
      best.ceiling = ceiling;
      best.k_used = k;
      best.c_used = c;
      first = false;
    }
  }
  return best;
}

std::optional<NodeBound> node_accuracy_ceiling(
    const Graph& g, NodeId r, const UtilityFunctionSpec& spec, double epsilon,
    const std::vector<double>& c_grid) {
  const UtilityVector uv = utility_vector(g, r, spec);
  if (!(uv.u_max > 0.0)) return std::nullopt;
  std::uint32_t t = 0;
  if (spec.kind == UtilityKind::CommonNeighbors) {
    t = t_common_neighbors(g, r);
  } else {
    const WeightedPathsT wt = t_weighted_paths(g, r, spec.gamma);
    t = wt.feasible ? wt.t : t_generic(g);
  }
  return node_accuracy_ceiling(uv, t, epsilon, c_grid);
}

double vector_accuracy_ceiling(const UtilityVector& uv, double epsilon) {
  if (!(uv.u_max > 0.0)) throw std::domain_error("u_max must be positive");
  std::uint64_t k = 0;
  for (double u : uv.values) {
    if (u > 0.0) ++k;
  }
  return accuracy_upper_bound(uv.candidates.size(), k, uv.u_max, 1.0, epsilon);
}

double exp_mech_ratio_floor(std::uint64_t k, bool flat_top) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const double kd = static_cast<double>(k);
  return flat_top ? kd / (kd + 1.0) : 1.0 / (kd + 1.0);
}

}  // namespace privrec
