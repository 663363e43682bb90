#include "privrec/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace privrec {

void UtilityFunctionSpec::validate() const {
  if (kind == UtilityKind::WeightedPaths) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
      throw std::invalid_argument("gamma must lie in (0, 1)");
    }
    if (max_length < 2) {
      throw std::invalid_argument("max_length must be at least 2");
    }
  }
}

void UtilityVector::recompute_u_max() {
  u_max = 0.0;
  for (double v : values) u_max = std::max(u_max, v);
}

namespace {

// Marks {r} U N(r) in ws.excluded and returns the candidate list.
std::vector<NodeId> mark_excluded(const Graph& g, NodeId r,
                                  UtilityWorkspace& ws) {
  ws.excluded.assign(g.node_count(), 0);
  ws.excluded[r] = 1;
  for (NodeId w : g.neighbors(r)) ws.excluded[w] = 1;
  std::vector<NodeId> candidates;
  candidates.reserve(g.node_count() - 1 - g.degree(r));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (!ws.excluded[v]) candidates.push_back(v);
  }
  return candidates;
}

void common_neighbors_fill(const Graph& g, NodeId r, UtilityVector& uv,
                           UtilityWorkspace& ws) {
  ws.count.assign(g.node_count(), 0);
  ws.touched.clear();
  for (NodeId w : g.neighbors(r)) {
    for (NodeId i : g.neighbors(w)) {
      if (ws.excluded[i]) continue;
      if (ws.count[i] == 0) ws.touched.push_back(i);
      ++ws.count[i];
    }
  }
  uv.values.resize(uv.candidates.size());
  for (std::size_t idx = 0; idx < uv.candidates.size(); ++idx) {
    uv.values[idx] = static_cast<double>(ws.count[uv.candidates[idx]]);
  }
  uv.sensitivity = 1.0;
}

void weighted_paths_fill(const Graph& g, NodeId r,
                         const UtilityFunctionSpec& spec, UtilityVector& uv,
                         UtilityWorkspace& ws) {
  // walk_cur[i] = number of length-l walks r -> i; accumulate
  // gamma^{l-1} * walks for l = 2..max_length.
  ws.walk_cur.assign(g.node_count(), 0.0);
  ws.walk_next.assign(g.node_count(), 0.0);
  ws.walk_acc.assign(g.node_count(), 0.0);
  for (NodeId w : g.neighbors(r)) ws.walk_cur[w] = 1.0;  // l = 1
  double gamma_pow = spec.gamma;                          // gamma^{l-1} at l=2
  for (int l = 2; l <= spec.max_length; ++l) {
    std::fill(ws.walk_next.begin(), ws.walk_next.end(), 0.0);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const double walks = ws.walk_cur[v];
      if (walks == 0.0) continue;
      for (NodeId w : g.neighbors(v)) ws.walk_next[w] += walks;
    }
    for (NodeId v = 0; v < g.node_count(); ++v) {
      ws.walk_acc[v] += gamma_pow * ws.walk_next[v];
    }
    ws.walk_cur.swap(ws.walk_next);
    gamma_pow *= spec.gamma;
  }
  uv.values.resize(uv.candidates.size());
  for (std::size_t idx = 0; idx < uv.candidates.size(); ++idx) {
    uv.values[idx] = ws.walk_acc[uv.candidates[idx]];
  }
  uv.sensitivity =
      weighted_paths_sensitivity(spec.gamma, spec.max_length, g.max_degree());
}

}  // namespace

UtilityVector utility_vector(const Graph& g, NodeId r,
                             const UtilityFunctionSpec& spec,
                             UtilityWorkspace& ws) {
  spec.validate();
  g.check_node(r);
  UtilityVector uv;
  uv.target = r;
  uv.candidates = mark_excluded(g, r, ws);
  if (spec.kind == UtilityKind::CommonNeighbors) {
    common_neighbors_fill(g, r, uv, ws);
  } else {
    weighted_paths_fill(g, r, spec, uv, ws);
  }
  uv.recompute_u_max();
  return uv;
}

UtilityVector utility_vector(const Graph& g, NodeId r,
                             const UtilityFunctionSpec& spec) {
  UtilityWorkspace ws;
  return utility_vector(g, r, spec, ws);
}

UtilityVector utility_vector_serial(const Graph& g, NodeId r,
                                    const UtilityFunctionSpec& spec) {
  spec.validate();
  g.check_node(r);
  UtilityVector uv;
  uv.target = r;
  uv.candidates = candidate_set(g, r);
  uv.values.resize(uv.candidates.size());
  if (spec.kind == UtilityKind::CommonNeighbors) {
    for (std::size_t idx = 0; idx < uv.candidates.size(); ++idx) {
      uv.values[idx] = static_cast<double>(
          common_neighbor_count(g, uv.candidates[idx], r));
    }
    uv.sensitivity = 1.0;
  } else {
    // Dense matrix-free walk counting per candidate: counts[l][v] built by
    // full passes; simple and independent of the sparse kernel.
    std::vector<double> cur(g.node_count(), 0.0), nxt(g.node_count(), 0.0);
    std::vector<double> acc(g.node_count(), 0.0);
    cur[r] = 1.0;  // l = 0
    double gamma_pow = 1.0;
    for (int l = 1; l <= spec.max_length; ++l) {
      for (NodeId v = 0; v < g.node_count(); ++v) {
        double total = 0.0;
        for (NodeId w : g.neighbors(v)) total += cur[w];
        nxt[v] = total;
      }
      if (l >= 2) {
        for (NodeId v = 0; v < g.node_count(); ++v) {
          acc[v] += gamma_pow * nxt[v];
        }
      }
      cur.swap(nxt);
      gamma_pow = (l == 1) ? spec.gamma : gamma_pow * spec.gamma;
    }
    for (std::size_t idx = 0; idx < uv.candidates.size(); ++idx) {
      uv.values[idx] = acc[uv.candidates[idx]];
    }
    uv.sensitivity =
        weighted_paths_sensitivity(spec.gamma, spec.max_length, g.max_degree());
  }
  uv.recompute_u_max();
  return uv;
}

double weighted_paths_sensitivity(double gamma, int max_length,
                                  std::uint32_t d_max) {
  double total = 0.0;
  double gamma_pow = gamma;  // gamma^{l-1} at l = 2
  double dmax_pow = 1.0;     // d_max^{l-2} at l = 2
  for (int l = 2; l <= max_length; ++l) {
    total += gamma_pow * static_cast<double>(l - 1) * dmax_pow;
    gamma_pow *= gamma;
    dmax_pow *= static_cast<double>(d_max);
  }
  return total;
}

UtilityVector scale_to_unit_sensitivity(UtilityVector uv) {
  if (!(uv.sensitivity > 0.0)) {
    throw std::invalid_argument("sensitivity must be positive");
  }
  const double inv = 1.0 / uv.sensitivity;
  for (double& v : uv.values) v *= inv;
  uv.sensitivity = 1.0;
  uv.recompute_u_max();
  return uv;
}

int concentration_beta(const UtilityVector& uv, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("fraction must lie in (0, 1]");
  }
  const double total = std::accumulate(uv.values.begin(), uv.values.end(), 0.0);
  if (!(total > 0.0)) throw std::domain_error("all-zero utility vector");
  std::vector<double> sorted(uv.values);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    running += sorted[i];
    if (running >= fraction * total) return static_cast<int>(i + 1);
  }
  return static_cast<int>(sorted.size());
}

bool exchangeability_check(const Graph& g, NodeId r,
                           const UtilityFunctionSpec& spec,
                           const std::vector<NodeId>& permutation) {
  if (permutation.size() != g.node_count()) {
    throw std::invalid_argument("permutation size mismatch");
  }
  if (permutation[r] != r) {
    throw std::invalid_argument("permutation must fix the target");
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(g.edge_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (NodeId w : g.neighbors(v)) {
      if (v >= w) continue;
      NodeId a = permutation[v], b = permutation[w];
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  }
  const Graph permuted = Graph::from_edges(g.node_count(), edges);
  const UtilityVector base = utility_vector(g, r, spec);
  const UtilityVector mapped = utility_vector(permuted, r, spec);
  // mapped value at permutation[i] must equal base value at i.
  std::vector<double> expect(g.node_count(), -1.0);
  for (std::size_t idx = 0; idx < base.candidates.size(); ++idx) {
    expect[permutation[base.candidates[idx]]] = base.values[idx];
  }
  if (mapped.candidates.size() != base.candidates.size()) return false;
  for (std::size_t idx = 0; idx < mapped.candidates.size(); ++idx) {
    const double want = expect[mapped.candidates[idx]];
    if (want < 0.0) return false;  // candidate sets disagree
    if (std::fabs(mapped.values[idx] - want) > 1e-12 * (1.0 + want)) {
      return false;
    }
  }
  return true;
}

}  // namespace privrec
