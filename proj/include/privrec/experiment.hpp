// Per-node evaluation harness: exact exponential accuracy, Monte Carlo
// Laplace accuracy, theoretical ceilings, and the CSV/JSON reporting layer
// behind the accuracy-vs-ceiling, CDF, and degree-bucket tables.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privrec/bounds.hpp"
#include "privrec/graph.hpp"
#include "privrec/utility.hpp"

namespace privrec {

struct ExperimentConfig {
  double epsilon = 0.1;
  UtilityFunctionSpec utility;
  bool run_exponential = true;
  bool run_laplace = true;
  int laplace_trials = 1000;
  std::uint64_t seed = 0;
  std::vector<double> c_grid = {1.0};
  int worker_count = 0;  // 0: all available workers

  void validate() const;
};

// One evaluable node.  u_max is the unscaled utility of the best candidate
// (e.g. a common-neighbor count); accuracies are computed on the
// unit-sensitivity scaling, which leaves u(i)/u_max unchanged.  Mechanisms
// not selected in the config report NaN.
struct NodeRow {
  std::uint32_t raw_id = 0;
  std::uint32_t degree = 0;
  std::uint64_t candidates = 0;
  std::uint64_t k = 0;  // high-utility count at the ceiling-minimizing c
  double u_max = 0.0;
  double acc_exp = 0.0;
  double acc_lap = 0.0;
  double acc_lap_se = 0.0;
  double ceiling = 1.0;
};

struct AccuracyReport {
  std::vector<NodeRow> rows;                  // ascending raw_id
  std::vector<std::uint32_t> skipped_raw_ids; // u_max = 0, ascending
  ExperimentConfig config;
  std::uint64_t graph_nodes = 0;
  std::uint64_t graph_edges = 0;
};

// nullopt exactly when u_max(r) = 0 (the skip marker).
std::optional<NodeRow> evaluate_node(const Graph& g, NodeId r,
                                     const ExperimentConfig& cfg,
                                     UtilityWorkspace& ws);

// Evaluates every node.  Deterministic for a fixed seed at any worker count:
// each node's Monte Carlo stream is derived from (seed, node, trial), and
// rows are gathered in id order after the parallel map.
AccuracyReport run_experiment(const Graph& g, const ExperimentConfig& cfg);

// Single-threaded reference with the identical result, kept for testing.
AccuracyReport run_experiment_serial(const Graph& g,
                                     const ExperimentConfig& cfg);

enum class ReportSeries { Exponential, Laplace, Ceiling };

struct CdfTable {
  std::vector<double> thresholds;  // 0.00, 0.01, ..., 1.00
  std::vector<double> fractions;   // fraction of evaluable nodes >= threshold
};

CdfTable accuracy_cdf(const AccuracyReport& report, ReportSeries series);

struct DegreeBucketRow {
  std::uint32_t min_degree = 0;  // power-of-two bucket [min, max]
  std::uint32_t max_degree = 0;
  std::uint64_t nodes = 0;
  double mean_acc_exp = 0.0;
  double mean_acc_lap = 0.0;
  double mean_ceiling = 0.0;
};

std::vector<DegreeBucketRow> accuracy_vs_degree(const AccuracyReport& report);

// report.csv: raw_id,degree,candidates,k,u_max,acc_exp,acc_lap,acc_lap_se,ceiling
void write_report_csv(const AccuracyReport& report, const std::string& path);
// cdf.csv: threshold,frac_acc_exp,frac_acc_lap,frac_ceiling
void write_cdf_csv(const AccuracyReport& report, const std::string& path);
// by_degree.csv: min_degree,max_degree,nodes,mean_acc_exp,mean_acc_lap,mean_ceiling
void write_by_degree_csv(const AccuracyReport& report, const std::string& path);
// config.json provenance sidecar (config echo, graph summary, skipped nodes).
void write_config_json(const AccuracyReport& report, const std::string& path);

// Reads a report.csv back (rows only; config left at defaults).
AccuracyReport read_report_csv(const std::string& path);

}  // namespace privrec
