// Per-target utility vectors: common neighbors and truncated weighted paths
// (Katz-style walk counts), with the sensitivity/scaling convention.
#pragma once

#include <cstdint>
#include <vector>

#include "privrec/graph.hpp"

namespace privrec {

enum class UtilityKind { CommonNeighbors, WeightedPaths };

struct UtilityFunctionSpec {
  UtilityKind kind = UtilityKind::CommonNeighbors;
  double gamma = 0.1;  // WeightedPaths decay, must be in (0, 1)
  int max_length = 4;  // WeightedPaths truncation, must be >= 2

  void validate() const;
};

struct UtilityVector {
  NodeId target = 0;
  std::vector<NodeId> candidates;  // ascending ids, V \ ({r} U N(r))
  std::vector<double> values;      // aligned with candidates, all >= 0
  double sensitivity = 1.0;        // per-coordinate worst case, one protected flip
  double u_max = 0.0;

  void recompute_u_max();
};

// Reusable scratch for the sparse common-neighbors kernel (one per worker).
struct UtilityWorkspace {
  std::vector<std::uint32_t> count;
  std::vector<std::uint8_t> excluded;  // marks {r} U N(r)
  std::vector<NodeId> touched;
  std::vector<double> walk_cur, walk_next, walk_acc;  // WeightedPaths buffers
};

// Production kernel.  CommonNeighbors: two-hop sparse counting, O(sum of
// neighbor degrees).  WeightedPaths: repeated sparse adjacency expansion of
// walk counts, truncated at spec.max_length.
UtilityVector utility_vector(const Graph& g, NodeId r,
                             const UtilityFunctionSpec& spec,
                             UtilityWorkspace& ws);
UtilityVector utility_vector(const Graph& g, NodeId r,
                             const UtilityFunctionSpec& spec);

// Straightforward per-candidate reference implementation kept for testing the
// kernel (quadratic in the candidate count; do not use on large graphs).
UtilityVector utility_vector_serial(const Graph& g, NodeId r,
                                    const UtilityFunctionSpec& spec);

// Conservative per-coordinate sensitivity of the truncated weighted-paths
// utility under one protected edge flip:
//   delta_f = sum_{l=2..L} gamma^{l-1} * (l-1) * d_max^{l-2}.
double weighted_paths_sensitivity(double gamma, int max_length,
                                  std::uint32_t d_max);

// Divides values by the recorded sensitivity and sets it to 1.
UtilityVector scale_to_unit_sensitivity(UtilityVector uv);

// Smallest count of top utilities whose sum reaches fraction * total.
// Throws std::domain_error on an all-zero vector.
int concentration_beta(const UtilityVector& uv, double fraction);

// True when the utility vector on the permuted graph equals the permuted
// utility vector.  permutation maps old id -> new id and must fix r.
bool exchangeability_check(const Graph& g, NodeId r,
                           const UtilityFunctionSpec& spec,
                           const std::vector<NodeId>& permutation);

}  // namespace privrec
