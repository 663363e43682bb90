#include "privrec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "privrec/mechanisms.hpp"

namespace privrec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// %.17g round-trips doubles exactly and is locale-independent under the
// untouched "C" locale; integer-valued doubles print without a decimal point.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // \n endings on every platform
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

int degree_bucket(std::uint32_t d) {
  if (d == 0) return 0;
  int b = 0;
  while ((1u << (b + 1)) <= d) ++b;
  return b + 1;  // bucket 1 = [1,1], 2 = [2,3], 3 = [4,7], ...
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  utility.validate();
  if (laplace_trials < 1) {
    throw std::invalid_argument("laplace_trials must be >= 1");
  }
  if (c_grid.empty()) throw std::invalid_argument("c_grid must be nonempty");
  for (double c : c_grid) {
    if (!(c > 0.0 && c <= 1.0)) {
      throw std::invalid_argument("c_grid entries must lie in (0, 1]");
    }
  }
  if (worker_count < 0) {
    throw std::invalid_argument("worker_count must be >= 0");
  }
}

std::optional<NodeRow> evaluate_node(const Graph& g, NodeId r,
                                     const ExperimentConfig& cfg,
                                     UtilityWorkspace& ws) {
  UtilityVector uv = utility_vector(g, r, cfg.utility, ws);
  if (uv.u_max <= 0.0) return std::nullopt;

  NodeRow row;
  row.raw_id = g.raw_label(r);
  row.degree = g.degree(r);
  row.candidates = uv.candidates.size();
  row.u_max = uv.u_max;

  const UtilityVector scaled = scale_to_unit_sensitivity(std::move(uv));

  row.acc_exp = cfg.run_exponential
                    ? exponential_expected_accuracy(scaled, cfg.epsilon, 1.0)
                    : kNaN;
  if (cfg.run_laplace) {
    MechanismParams params;
    params.epsilon = cfg.epsilon;
    params.delta_f = 1.0;
    params.seed = cfg.seed;
    row.acc_lap =
        laplace_mc_accuracy(scaled, params, cfg.laplace_trials, &row.acc_lap_se);
  } else {
    row.acc_lap = kNaN;
    row.acc_lap_se = kNaN;
  }

  std::uint32_t t = 0;
  if (cfg.utility.kind == UtilityKind::CommonNeighbors) {
    t = t_common_neighbors(g, r);
  } else {
    const WeightedPathsT wp = t_weighted_paths(g, r, cfg.utility.gamma);
    t = wp.feasible ? wp.t : t_generic(g);
  }
  const NodeBound bound = node_accuracy_ceiling(scaled, t, cfg.epsilon, cfg.c_grid);
  row.k = bound.k_used;
  row.ceiling = bound.ceiling;
  return row;
}

namespace {

AccuracyReport gather(const Graph& g, const ExperimentConfig& cfg,
                      std::vector<std::optional<NodeRow>>&& results) {
  AccuracyReport report;
  report.config = cfg;
  report.graph_nodes = g.node_count();
  report.graph_edges = g.edge_count();
  for (NodeId r = 0; r < g.node_count(); ++r) {
    if (results[r].has_value()) {
      report.rows.push_back(*results[r]);
    } else {
      report.skipped_raw_ids.push_back(g.raw_label(r));
    }
  }
  // Dense ids are assigned in ascending raw-label order, so id order == raw
  // order; keep the sort as a guard for future id remappings.
  std::sort(report.rows.begin(), report.rows.end(),
            [](const NodeRow& a, const NodeRow& b) { return a.raw_id < b.raw_id; });
  std::sort(report.skipped_raw_ids.begin(), report.skipped_raw_ids.end());
  return report;
}

}  // namespace

AccuracyReport run_experiment(const Graph& g, const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::optional<NodeRow>> results(g.node_count());
#ifdef _OPENMP
  const int workers =
      cfg.worker_count > 0 ? cfg.worker_count : omp_get_max_threads();
#pragma omp parallel num_threads(workers)
  {
    UtilityWorkspace ws;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(g.node_count());
         ++r) {
      results[r] = evaluate_node(g, static_cast<NodeId>(r), cfg, ws);
    }
  }
#else
  UtilityWorkspace ws;
  for (NodeId r = 0; r < g.node_count(); ++r) {
    results[r] = evaluate_node(g, r, cfg, ws);
  }
#endif
  return gather(g, cfg, std::move(results));
}

AccuracyReport run_experiment_serial(const Graph& g,
                                     const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::optional<NodeRow>> results(g.node_count());
  UtilityWorkspace ws;
  for (NodeId r = 0; r < g.node_count(); ++r) {
    results[r] = evaluate_node(g, r, cfg, ws);
  }
  return gather(g, cfg, std::move(results));
}

namespace {

double series_value(const NodeRow& row, ReportSeries series) {
  switch (series) {
    case ReportSeries::Exponential: return row.acc_exp;
    case ReportSeries::Laplace: return row.acc_lap;
    case ReportSeries::Ceiling: return row.ceiling;
  }
  return kNaN;
}

}  // namespace

CdfTable accuracy_cdf(const AccuracyReport& report, ReportSeries series) {
  if (report.rows.empty()) throw std::invalid_argument("empty report");
  CdfTable table;
  table.thresholds.reserve(101);
  table.fractions.reserve(101);
  const double n = static_cast<double>(report.rows.size());
  for (int i = 0; i <= 100; ++i) {
    const double threshold = i / 100.0;
    std::uint64_t count = 0;
    for (const NodeRow& row : report.rows) {
      if (series_value(row, series) >= threshold) ++count;
    }
    table.thresholds.push_back(threshold);
    table.fractions.push_back(count / n);
  }
  return table;
}

std::vector<DegreeBucketRow> accuracy_vs_degree(const AccuracyReport& report) {
  if (report.rows.empty()) throw std::invalid_argument("empty report");
  std::vector<DegreeBucketRow> buckets(33);
  for (const NodeRow& row : report.rows) {
    DegreeBucketRow& b = buckets[degree_bucket(row.degree)];
    b.nodes += 1;
    b.mean_acc_exp += row.acc_exp;
    b.mean_acc_lap += row.acc_lap;
    b.mean_ceiling += row.ceiling;
  }
  std::vector<DegreeBucketRow> out;
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    DegreeBucketRow b = buckets[i];
    if (b.nodes == 0) continue;
    b.min_degree = i == 0 ? 0 : 1u << (i - 1);
    b.max_degree = i == 0 ? 0 : (1u << i) - 1;
    b.mean_acc_exp /= static_cast<double>(b.nodes);
    b.mean_acc_lap /= static_cast<double>(b.nodes);
    b.mean_ceiling /= static_cast<double>(b.nodes);
    out.push_back(b);
  }
  return out;
}

void write_report_csv(const AccuracyReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "raw_id,degree,candidates,k,u_max,acc_exp,acc_lap,acc_lap_se,ceiling\n";
  for (const NodeRow& r : report.rows) {
    out << r.raw_id << ',' << r.degree << ',' << r.candidates << ',' << r.k
        << ',' << fmt(r.u_max) << ',' << fmt(r.acc_exp) << ',' << fmt(r.acc_lap)
        << ',' << fmt(r.acc_lap_se) << ',' << fmt(r.ceiling) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

void write_cdf_csv(const AccuracyReport& report, const std::string& path) {
  const CdfTable exp_cdf = accuracy_cdf(report, ReportSeries::Exponential);
  const CdfTable lap_cdf = accuracy_cdf(report, ReportSeries::Laplace);
  const CdfTable ceil_cdf = accuracy_cdf(report, ReportSeries::Ceiling);
  std::ofstream out = open_out(path);
  out << "threshold,frac_acc_exp,frac_acc_lap,frac_ceiling\n";
  for (std::size_t i = 0; i < exp_cdf.thresholds.size(); ++i) {
    out << fmt(exp_cdf.thresholds[i]) << ',' << fmt(exp_cdf.fractions[i]) << ','
        << fmt(lap_cdf.fractions[i]) << ',' << fmt(ceil_cdf.fractions[i])
        << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

void write_by_degree_csv(const AccuracyReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "min_degree,max_degree,nodes,mean_acc_exp,mean_acc_lap,mean_ceiling\n";
  for (const DegreeBucketRow& b : accuracy_vs_degree(report)) {
    out << b.min_degree << ',' << b.max_degree << ',' << b.nodes << ','
        << fmt(b.mean_acc_exp) << ',' << fmt(b.mean_acc_lap) << ','
        << fmt(b.mean_ceiling) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

void write_config_json(const AccuracyReport& report, const std::string& path) {
  nlohmann::ordered_json j;
  j["epsilon"] = report.config.epsilon;
  j["utility"] = {
      {"kind", report.config.utility.kind == UtilityKind::CommonNeighbors
                   ? "common_neighbors"
                   : "weighted_paths"},
      {"gamma", report.config.utility.gamma},
      {"max_length", report.config.utility.max_length},
  };
  nlohmann::ordered_json mechanisms = nlohmann::ordered_json::array();
  if (report.config.run_exponential) mechanisms.push_back("exponential");
  if (report.config.run_laplace) mechanisms.push_back("laplace");
  j["mechanisms"] = mechanisms;
  j["laplace_trials"] = report.config.laplace_trials;
  j["seed"] = report.config.seed;
  j["c_grid"] = report.config.c_grid;
  j["worker_count"] = report.config.worker_count;
  j["graph"] = {{"nodes", report.graph_nodes}, {"edges", report.graph_edges}};
  j["evaluated_nodes"] = report.rows.size();
  j["skipped_count"] = report.skipped_raw_ids.size();
  j["skipped_raw_ids"] = report.skipped_raw_ids;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

AccuracyReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty report: " + path);
  if (line == "raw_id,degree,candidates,k,u_max,acc_exp,acc_lap,acc_lap_se,ceiling\r") {
    line.pop_back();
  }
  if (line != "raw_id,degree,candidates,k,u_max,acc_exp,acc_lap,acc_lap_se,ceiling") {
    throw DataError("unexpected report header: " + line);
  }
  AccuracyReport report;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == ',') {
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
      }
    }
    if (fields.size() != 9) throw ParseError(lineno, "malformed report row");
    // strtod (unlike istream extraction under libstdc++) accepts nan/inf.
    const auto num = [&](int i) {
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') {
        throw ParseError(lineno, "bad numeric field: " + fields[i]);
      }
      return v;
    };
    const auto integer = [&](int i) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(fields[i].c_str(), &end, 10);
      if (end == fields[i].c_str() || *end != '\0') {
        throw ParseError(lineno, "bad integer field: " + fields[i]);
      }
      return v;
    };
    NodeRow r;
    r.raw_id = static_cast<std::uint32_t>(integer(0));
    r.degree = static_cast<std::uint32_t>(integer(1));
    r.candidates = integer(2);
    r.k = integer(3);
    r.u_max = num(4);
    r.acc_exp = num(5);
    r.acc_lap = num(6);
    r.acc_lap_se = num(7);
    r.ceiling = num(8);
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace privrec
