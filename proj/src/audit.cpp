#include "privrec/audit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "privrec/mechanisms.hpp"

namespace privrec {

namespace {

// Lexicographic pair table for n nodes: (0,1), (0,2), ..., (n-2,n-1).
std::vector<std::pair<NodeId, NodeId>> pair_table(int n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (NodeId u = 0; u + 1 < static_cast<NodeId>(n); ++u) {
    for (NodeId v = u + 1; v < static_cast<NodeId>(n); ++v) {
      pairs.emplace_back(u, v);
    }
  }
  return pairs;
}

}  // namespace

Graph graph_from_mask(int n, std::uint64_t mask) {
  if (n < 1 || n > 11) {
    throw std::invalid_argument("graph_from_mask supports 1..11 nodes");
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  int b = 0;
  for (NodeId u = 0; u + 1 < static_cast<NodeId>(n); ++u) {
    for (NodeId v = u + 1; v < static_cast<NodeId>(n); ++v, ++b) {
      if ((mask >> b) & 1u) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(static_cast<NodeId>(n), edges);
}

namespace {

struct WorstTracker {
  double max_ln_ratio = 0.0;
  double max_excess = -1e300;
  AuditWorstCase worst;
  bool have_worst = false;
  std::uint64_t flips = 0;

  static std::tuple<int, std::uint64_t, NodeId, NodeId, NodeId> key(
      const AuditWorstCase& w) {
    return {w.n, w.mask, w.target, w.flip.u, w.flip.v};
  }

  void offer(double lnr, double excess, const AuditWorstCase& cand) {
    if (excess > max_excess) max_excess = excess;
    if (!have_worst || lnr > max_ln_ratio ||
        (lnr == max_ln_ratio && key(cand) < key(worst))) {
      max_ln_ratio = lnr;
      worst = cand;
      have_worst = true;
    }
  }

  // Deterministic merge regardless of thread interleaving.
  void merge(const WorstTracker& o) {
    if (o.max_excess > max_excess) max_excess = o.max_excess;
    if (o.have_worst) offer(o.max_ln_ratio, -1e300, o.worst);
    flips += o.flips;
  }
};

// Selection probabilities for target r on g through the real mechanism code
// paths, aligned with candidate_set(g, r) order; empty when r has no
// candidates.  Weighted-paths utilities are rescaled to the flip-invariant
// public sensitivity bound (d_max <= n - 1) so that one fixed mechanism is
// audited on both sides of each flip.
std::vector<double> audit_distribution(const Graph& g, NodeId r,
                                       const AuditConfig& cfg) {
  UtilityVector uv = utility_vector(g, r, cfg.utility);
  if (uv.candidates.empty()) return {};
  if (cfg.utility.kind == UtilityKind::WeightedPaths) {
    uv.sensitivity = weighted_paths_sensitivity(
        cfg.utility.gamma, cfg.utility.max_length,
        static_cast<std::uint32_t>(g.node_count() - 1));
  }
  uv = scale_to_unit_sensitivity(uv);
  MechanismParams params;
  params.epsilon = cfg.epsilon;
  params.delta_f = 1.0;
  switch (cfg.mechanism) {
    case AuditMechanism::Exponential:
      return exponential_distribution(uv, params).probabilities;
    case AuditMechanism::Laplace:
      return laplace_selection_probabilities(uv, params, cfg.quadrature_tol)
          .probabilities;
    case AuditMechanism::Smoothing: {
      auto base = exponential_distribution(uv, params);
      return linear_smoothing(base, cfg.smoothing_x).probabilities;
    }
  }
  return {};
}

}  // namespace

AuditReport privacy_audit(const AuditConfig& cfg) {
  if (cfg.max_nodes < 2 || cfg.max_nodes > 7) {
    throw std::invalid_argument("privacy_audit enumerates 2..7 nodes");
  }
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  cfg.utility.validate();
  if (cfg.mechanism == AuditMechanism::Smoothing &&
      !(cfg.smoothing_x >= 0.0 && cfg.smoothing_x < 1.0)) {
    throw std::invalid_argument("smoothing_x must lie in [0, 1)");
  }

  AuditReport report;
  WorstTracker global;

  for (int n = 2; n <= cfg.max_nodes; ++n) {
    const auto pairs = pair_table(n);
    const int npairs = static_cast<int>(pairs.size());
    const std::uint64_t nmask = 1ull << npairs;
    report.graphs_checked += nmask;

    // Selection probabilities are cached per (mask, target) when the table
    // fits comfortably; n = 7 for the exponential mechanism recomputes on the
    // fly instead (a 2^21 x 7 x 6 cache would need ~700 MB).
    const std::size_t stride = static_cast<std::size_t>(n - 1);
    const bool cached =
        nmask * static_cast<std::uint64_t>(n) * stride <= (3u << 20);
    std::vector<double> cache;
    std::vector<std::int8_t> cache_size;
    if (cached) {
      cache.assign(nmask * n * stride, 0.0);
      cache_size.assign(nmask * n, -1);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (cfg.parallel)
#endif
      for (std::int64_t mask = 0; mask < static_cast<std::int64_t>(nmask);
           ++mask) {
        const Graph g = graph_from_mask(n, static_cast<std::uint64_t>(mask));
        for (NodeId r = 0; r < static_cast<NodeId>(n); ++r) {
          const auto probs = audit_distribution(g, r, cfg);
          const std::size_t at = (static_cast<std::size_t>(mask) * n + r);
          cache_size[at] = static_cast<std::int8_t>(probs.size());
          std::copy(probs.begin(), probs.end(), cache.begin() + at * stride);
        }
      }
    }

    const auto probs_for = [&](std::uint64_t mask, NodeId r, const Graph* g,
                               std::vector<double>& scratch)
        -> std::pair<const double*, int> {
      if (cached) {
        const std::size_t at = static_cast<std::size_t>(mask) * n + r;
        return {cache.data() + at * stride, cache_size[at]};
      }
      scratch = g != nullptr
                    ? audit_distribution(*g, r, cfg)
                    : audit_distribution(graph_from_mask(n, mask), r, cfg);
      return {scratch.data(), static_cast<int>(scratch.size())};
    };

#ifdef _OPENMP
#pragma omp parallel if (cfg.parallel)
#endif
    {
      WorstTracker local;
      std::vector<double> scratch_a, scratch_b;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64)
#endif
      for (std::int64_t smask = 0; smask < static_cast<std::int64_t>(nmask);
           ++smask) {
        const std::uint64_t mask = static_cast<std::uint64_t>(smask);
        const Graph base = cached ? Graph() : graph_from_mask(n, mask);
        // Each unordered neighbor pair {G, G + e} is visited once, from the
        // side missing the edge; |ln ratio| covers both flip directions.
        for (int b = 0; b < npairs; ++b) {
          if ((mask >> b) & 1u) continue;
          const std::uint64_t other = mask | (1ull << b);
          const auto [fu, fv] = pairs[b];
          const Graph flipped =
              cached ? Graph() : graph_from_mask(n, other);
          for (NodeId r = 0; r < static_cast<NodeId>(n); ++r) {
            if (r == fu || r == fv) continue;  // protected flips only
            const auto [pa, na] =
                probs_for(mask, r, cached ? nullptr : &base, scratch_a);
            const auto [pb, nb] =
                probs_for(other, r, cached ? nullptr : &flipped, scratch_b);
            if (na != nb) {
              throw std::logic_error(
                  "candidate sets differ across a non-incident flip");
            }
            ++local.flips;
            if (na <= 0) continue;
            double lnr = 0.0;
            for (int i = 0; i < na; ++i) {
              if (pa[i] <= 0.0 || pb[i] <= 0.0) {
                throw std::logic_error("non-positive selection probability");
              }
              lnr = std::max(lnr, std::abs(std::log(pa[i] / pb[i])));
            }
            double excess = -1e300;
            if (cfg.mechanism == AuditMechanism::Smoothing) {
              excess = lnr - smoothing_privacy(
                                 cfg.smoothing_x,
                                 static_cast<std::uint64_t>(na));
            }
            local.offer(lnr, excess,
                        AuditWorstCase{n, mask, r,
                                       EdgeFlip{fu, fv, /*add=*/true}, lnr});
          }
        }
      }
#ifdef _OPENMP
#pragma omp critical(privrec_audit_merge)
#endif
      global.merge(local);
    }
  }

  report.max_ln_ratio = global.max_ln_ratio;
  report.max_excess_over_bound = global.max_excess;
  report.worst = global.worst;
  report.flips_checked = global.flips;
  return report;
}

namespace {

// Popcount-based inner audit for one labeled graph given bitmask adjacency.
void claim3_audit_graph(int n, const std::uint32_t* adj, std::uint64_t mask,
                        Claim3PerN& stats, bool& found, Claim3Counterexample& first) {
  for (int r = 0; r < n; ++r) {
    const std::uint32_t nr = adj[r];
    const int d_r = std::popcount(nr);
    for (int x = 0; x < n; ++x) {
      if (x == r || ((nr >> x) & 1u)) continue;        // candidates only
      if (std::popcount(adj[x] & nr) != 0) continue;   // zero utility only
      bool any_helper = false;
      bool strict_ok = false;
      bool weak_ok = true;
      for (int z = 0; z < n; ++z) {
        if (z == r || z == x || ((nr >> z) & 1u)) continue;
        any_helper = true;
        // Rewired graph: x joined to all of N(r), plus edges r-z and x-z.
        const std::uint32_t n2r = nr | (1u << z);
        const std::uint32_t n2x = adj[x] | nr | (1u << z);
        const int ux = std::popcount(n2x & n2r);  // always d_r + 1
        bool strict_here = true;
        for (int i = 0; i < n; ++i) {
          if (i == r || i == x) continue;
          std::uint32_t n2i = adj[i];
          if (i == z) n2i |= (1u << r) | (1u << x);
          if ((nr >> i) & 1u) n2i |= (1u << x);
          const int ui = std::popcount(n2i & n2r);
          if (ui > ux) weak_ok = false;
          if (ui >= ux && !((n2r >> i) & 1u)) strict_here = false;
        }
        if (strict_here) strict_ok = true;
      }
      if (!any_helper) continue;  // construction inapplicable; not a triple
      ++stats.triples;
      if (!weak_ok) ++stats.weak_failures;
      if (!strict_ok) {
        ++stats.strict_failures;
        if (d_r >= 1) ++stats.strict_failures_dr_pos;
        if (!found) {
          found = true;
          first = Claim3Counterexample{n, mask, static_cast<NodeId>(r),
                                       static_cast<NodeId>(x)};
        }
      }
    }
  }
}

}  // namespace

Claim3Report claim3_construction_audit(int max_nodes, bool parallel) {
  if (max_nodes < 2 || max_nodes > 7) {
    throw std::invalid_argument("claim3_construction_audit enumerates 2..7 nodes");
  }
  Claim3Report report;
  for (int n = 2; n <= max_nodes; ++n) {
    const auto pairs = pair_table(n);
    const int npairs = static_cast<int>(pairs.size());
    const std::uint64_t nmask = 1ull << npairs;
    Claim3PerN stats;
    stats.n = n;
    bool found = false;
    Claim3Counterexample first;

#ifdef _OPENMP
#pragma omp parallel if (parallel)
#endif
    {
      Claim3PerN local;
      bool local_found = false;
      Claim3Counterexample local_first;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (std::int64_t smask = 0; smask < static_cast<std::int64_t>(nmask);
           ++smask) {
        const std::uint64_t mask = static_cast<std::uint64_t>(smask);
        std::uint32_t adj[7] = {0, 0, 0, 0, 0, 0, 0};
        for (int b = 0; b < npairs; ++b) {
          if ((mask >> b) & 1u) {
            adj[pairs[b].first] |= 1u << pairs[b].second;
            adj[pairs[b].second] |= 1u << pairs[b].first;
          }
        }
        claim3_audit_graph(n, adj, mask, local, local_found, local_first);
      }
#ifdef _OPENMP
#pragma omp critical(privrec_claim3_merge)
#endif
      {
        stats.triples += local.triples;
        stats.strict_failures += local.strict_failures;
        stats.strict_failures_dr_pos += local.strict_failures_dr_pos;
        stats.weak_failures += local.weak_failures;
        if (local_found &&
            (!found ||
             std::tuple(local_first.mask, local_first.target, local_first.x) <
                 std::tuple(first.mask, first.target, first.x))) {
          found = true;
          first = local_first;
        }
      }
    }

    report.per_n.push_back(stats);
    report.triples += stats.triples;
    report.strict_failures += stats.strict_failures;
    report.weak_failures += stats.weak_failures;
    if (found && !report.has_counterexample) {
      report.has_counterexample = true;
      report.first = first;
    }
  }
  return report;
}

}  // namespace privrec
