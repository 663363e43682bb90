// Privacy/utility trade-off formulas: the accuracy ceiling, its inverse
// epsilon bound, the concentration-based bound, per-target edge-alteration
// budgets t, and the exponential-mechanism approximation-ratio floors.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "privrec/graph.hpp"
#include "privrec/utility.hpp"

namespace privrec {

// 1 - c (n - k) / ((n - k) + (k + 1) e^{eps t}), clamped to [0, 1].
// n = candidate count, k = high-utility count.  n == k returns 1.
double accuracy_upper_bound(std::uint64_t n, std::uint64_t k, double t,
                            double c, double epsilon);

// (1/t) (ln((c - delta)/delta) + ln((n - k)/(k + 1))).  Requires 0 < delta < c.
double epsilon_lower_bound(std::uint64_t n, std::uint64_t k, double t, double c,
                           double delta);

// (ln n - ln beta - ln ln n) / t.
double epsilon_lower_bound_concentration(std::uint64_t n, double beta,
                                         double t);

// Generic alteration budget: 4 * d_max.
std::uint32_t t_generic(const Graph& g);

// Common-neighbors budget: degree(r) + 2.
std::uint32_t t_common_neighbors(const Graph& g, NodeId r);

struct WeightedPathsT {
  bool feasible = false;
  double c = 1.0;        // smallest c >= 1 with (c - 1) >= s (c + 1)^2
  std::uint32_t t = 0;   // ceil(d_r + 2 (c - 1) d_r)
};

// s = gamma d_max / (1 - gamma d_max); infeasible when 1 - 8 s < 0 (the
// discriminant of s c^2 + (2 s - 1) c + (s + 1)); caller falls back to
// t_generic.  Requires gamma * d_max < 1.
WeightedPathsT t_weighted_paths(const Graph& g, NodeId r, double gamma);

struct NodeBound {
  NodeId target = 0;
  double ceiling = 1.0;
  std::uint32_t t_used = 0;
  std::uint64_t k_used = 0;
  double c_used = 1.0;
};

// Tightest (minimum) ceiling over the c grid for the given, already computed,
// utility vector; t supplied by the caller.  k(c) counts u_i > (1-c) u_max.
NodeBound node_accuracy_ceiling(const UtilityVector& uv, std::uint32_t t,
                                double epsilon, const std::vector<double>& c_grid);

// Convenience overload computing the utility vector and the utility-family t
// (common neighbors: d_r + 2; weighted paths: rewiring t, generic fallback).
// nullopt when u_max = 0 (skipped node).
std::optional<NodeBound> node_accuracy_ceiling(const Graph& g, NodeId r,
                                               const UtilityFunctionSpec& spec,
                                               double epsilon,
                                               const std::vector<double>& c_grid);

// Ceiling paired the way the ratio-floor proof pairs it: t = u_max of the
// *unscaled* integer utility, c = 1.  Used by the floor checks on synthetic
// vectors, where no graph (hence no degree) exists.
double vector_accuracy_ceiling(const UtilityVector& uv, double epsilon);

// 1/(k+1) in general, k/(k+1) for flat-top vectors.
double exp_mech_ratio_floor(std::uint64_t k, bool flat_top);

}  // namespace privrec
