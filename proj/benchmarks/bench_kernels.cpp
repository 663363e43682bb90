// Microbenchmarks comparing the OpenMP kernels against their serial reference
// implementations, and the grouped Laplace sampler against the naive one.
//
//   cmake --build build --target privrec_bench   (built by default when the
//   benchmark library is installed; gate: -DPRIVREC_BUILD_BENCHMARKS=ON/OFF)
//   ./build/privrec_bench
#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "../tests/test_util.hpp"
#include "privrec/audit.hpp"
#include "privrec/experiment.hpp"
#include "privrec/graph.hpp"
#include "privrec/mechanisms.hpp"
#include "privrec/rng.hpp"
#include "privrec/utility.hpp"

namespace {

using privrec::Graph;
using privrec::NodeId;

const Graph& dense_graph() {
  static const Graph g = testutil::gnp_graph(2000, 0.02, 7);
  return g;
}

const Graph& medium_graph() {
  static const Graph g = testutil::gnp_graph(400, 0.05, 11);
  return g;
}

privrec::UtilityFunctionSpec wp_spec() {
  privrec::UtilityFunctionSpec spec;
  spec.kind = privrec::UtilityKind::WeightedPaths;
  spec.gamma = 0.005;
  spec.max_length = 4;
  return spec;
}

// A long utility vector with heavy value ties, the shape the grouped sampler
// is designed for (common-neighbor counts repeat constantly).
privrec::UtilityVector tied_utilities(std::size_t n) {
  privrec::UtilityVector uv;
  privrec::SplitMix64 rng(5);
  for (std::size_t i = 0; i < n; ++i) {
    uv.candidates.push_back(static_cast<NodeId>(i));
    uv.values.push_back(static_cast<double>(rng.next_below(12)));
  }
  uv.sensitivity = 1.0;
  uv.recompute_u_max();
  return uv;
}

void BM_CommonNeighbors_Serial(benchmark::State& state) {
  const Graph& g = dense_graph();
  privrec::UtilityFunctionSpec cn;
  NodeId r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::utility_vector_serial(g, r, cn));
    r = (r + 1) % g.node_count();
  }
}
BENCHMARK(BM_CommonNeighbors_Serial);

void BM_CommonNeighbors_OpenMP(benchmark::State& state) {
  const Graph& g = dense_graph();
  privrec::UtilityFunctionSpec cn;
  NodeId r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::utility_vector(g, r, cn));
    r = (r + 1) % g.node_count();
  }
}
BENCHMARK(BM_CommonNeighbors_OpenMP);

void BM_WeightedPaths_Serial(benchmark::State& state) {
  const Graph& g = medium_graph();
  const auto spec = wp_spec();
  NodeId r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::utility_vector_serial(g, r, spec));
    r = (r + 1) % g.node_count();
  }
}
BENCHMARK(BM_WeightedPaths_Serial);

void BM_WeightedPaths_OpenMP(benchmark::State& state) {
  const Graph& g = medium_graph();
  const auto spec = wp_spec();
  NodeId r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::utility_vector(g, r, spec));
    r = (r + 1) % g.node_count();
  }
}
BENCHMARK(BM_WeightedPaths_OpenMP);

void BM_LaplaceRecommend_Naive(benchmark::State& state) {
  const auto uv = tied_utilities(static_cast<std::size_t>(state.range(0)));
  privrec::MechanismParams p;
  p.epsilon = 0.1;
  privrec::SplitMix64 rng(9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::laplace_recommend_naive(uv, p, rng));
  }
}
BENCHMARK(BM_LaplaceRecommend_Naive)->Arg(1000)->Arg(10000);

void BM_LaplaceRecommend_Grouped(benchmark::State& state) {
  const auto uv = tied_utilities(static_cast<std::size_t>(state.range(0)));
  privrec::MechanismParams p;
  p.epsilon = 0.1;
  privrec::SplitMix64 rng(9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::laplace_recommend(uv, p, rng));
  }
}
BENCHMARK(BM_LaplaceRecommend_Grouped)->Arg(1000)->Arg(10000);

void BM_Experiment_Serial(benchmark::State& state) {
  const Graph& g = medium_graph();
  privrec::ExperimentConfig cfg;
  cfg.epsilon = 0.5;
  cfg.laplace_trials = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::run_experiment_serial(g, cfg));
  }
}
BENCHMARK(BM_Experiment_Serial)->Unit(benchmark::kMillisecond);

void BM_Experiment_OpenMP(benchmark::State& state) {
  const Graph& g = medium_graph();
  privrec::ExperimentConfig cfg;
  cfg.epsilon = 0.5;
  cfg.laplace_trials = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::run_experiment(g, cfg));
  }
}
BENCHMARK(BM_Experiment_OpenMP)->Unit(benchmark::kMillisecond);

void BM_PrivacyAudit(benchmark::State& state) {
  privrec::AuditConfig cfg;
  cfg.epsilon = 0.5;
  cfg.max_nodes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(privrec::privacy_audit(cfg));
  }
}
BENCHMARK(BM_PrivacyAudit)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
