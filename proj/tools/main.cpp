// privrec: differentially private social recommendation toolkit.
//
// Subcommands: ingest, stats, recommend, evaluate, bounds, compare, audit.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "privrec/audit.hpp"
#include "privrec/bounds.hpp"
#include "privrec/experiment.hpp"
#include "privrec/graph.hpp"
#include "privrec/mechanisms.hpp"
#include "privrec/rng.hpp"
#include "privrec/utility.hpp"

namespace {

using privrec::Graph;
using privrec::NodeId;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t env_seed_default() {
  const char* env = std::getenv("PRIVREC_SEED");
  if (env == nullptr || *env == '\0') return 0;
  return std::strtoull(env, nullptr, 10);
}

privrec::UtilityFunctionSpec make_utility(const std::string& name, double gamma,
                                          int max_length) {
  privrec::UtilityFunctionSpec spec;
  spec.kind = name == "wp" ? privrec::UtilityKind::WeightedPaths
                           : privrec::UtilityKind::CommonNeighbors;
  spec.gamma = gamma;
  spec.max_length = max_length;
  spec.validate();
  return spec;
}

Graph load_input(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw privrec::DataError("input file not found: " + path);
  }
  return privrec::load_graph_file(path);
}

// Common options shared by graph-consuming subcommands.
struct CommonOpts {
  std::string input;
  std::string utility = "cn";
  double gamma = 0.1;
  int max_length = 4;
  double epsilon = 0.1;
  std::uint64_t seed = env_seed_default();
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mechanism_params) {
  cmd->add_option("--input", o.input, "graph file (edge list or binary cache)")
      ->required();
  cmd->add_option("--utility", o.utility, "utility function: cn or wp")
      ->check(CLI::IsMember({"cn", "wp"}))
      ->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "weighted-paths decay, in (0,1)")
      ->capture_default_str();
  cmd->add_option("--max-length", o.max_length,
                  "weighted-paths truncation length, >= 2")
      ->capture_default_str();
  if (with_mechanism_params) {
    cmd->add_option("--epsilon", o.epsilon, "privacy parameter, > 0")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed,
                    "RNG seed (default: PRIVREC_SEED env var, else 0)");
  }
}

int run_ingest(const std::string& input, const std::string& output) {
  const Graph g = load_input(input);
  privrec::write_binary_cache_file(g, output);
  nlohmann::ordered_json j;
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["cache"] = output;
  std::cout << j.dump() << '\n';
  return 0;
}

int run_recommend(const CommonOpts& o, const std::string& mechanism,
                  std::uint32_t target_raw, double smoothing_x, bool explain) {
  const Graph g = load_input(o.input);
  const auto target = g.find_raw(target_raw);
  if (!target.has_value()) {
    throw privrec::DataError("target node not found: " +
                             std::to_string(target_raw));
  }
  const auto uspec = make_utility(o.utility, o.gamma, o.max_length);
  privrec::UtilityVector uv =
      privrec::scale_to_unit_sensitivity(privrec::utility_vector(g, *target, uspec));
  if (uv.candidates.empty()) {
    throw privrec::DataError("target has no candidates (complete neighborhood)");
  }

  privrec::MechanismParams params;
  params.epsilon = o.epsilon;
  params.delta_f = 1.0;
  params.seed = o.seed;
  privrec::SplitMix64 rng(privrec::derive_seed(o.seed, *target, 0));

  NodeId picked = 0;
  privrec::RecommendationDistribution dist;
  if (mechanism == "lap") {
    picked = privrec::laplace_recommend(uv, params, rng);
    if (explain) {
      dist = privrec::laplace_selection_probabilities(uv, params);
    }
  } else {
    dist = privrec::exponential_distribution(uv, params);
    if (mechanism == "smooth") {
      double x = smoothing_x;
      if (std::isnan(x)) {
        // Default budget 2*epsilon: ln(1 + n x/(1-x)) = 2*epsilon.
        x = privrec::smoothing_param_for_privacy(
            o.epsilon / std::log(static_cast<double>(dist.candidates.size())),
            dist.candidates.size());
      }
      dist = privrec::linear_smoothing(dist, x);
    }
    picked = privrec::sample(dist, rng);
  }

  std::cout << g.raw_label(picked) << '\n';
  if (explain) {
    std::vector<std::size_t> order(dist.candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (dist.probabilities[a] != dist.probabilities[b]) {
        return dist.probabilities[a] > dist.probabilities[b];
      }
      return dist.candidates[a] < dist.candidates[b];
    });
    std::cout << "raw_id,probability\n";
    for (std::size_t i = 0; i < order.size() && i < 10; ++i) {
      std::cout << g.raw_label(dist.candidates[order[i]]) << ','
                << fmt(dist.probabilities[order[i]]) << '\n';
    }
  }
  return 0;
}

int run_evaluate(const CommonOpts& o, const std::string& output_dir,
                 const std::vector<std::string>& mechanisms, int trials,
                 const std::vector<double>& c_grid, int workers) {
  const Graph g = load_input(o.input);
  privrec::ExperimentConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.utility = make_utility(o.utility, o.gamma, o.max_length);
  cfg.run_exponential =
      std::count(mechanisms.begin(), mechanisms.end(), "exp") > 0;
  cfg.run_laplace = std::count(mechanisms.begin(), mechanisms.end(), "lap") > 0;
  cfg.laplace_trials = trials;
  cfg.seed = o.seed;
  if (!c_grid.empty()) cfg.c_grid = c_grid;
  cfg.worker_count = workers;
  cfg.validate();

  std::filesystem::create_directories(output_dir);
  const auto report = privrec::run_experiment(g, cfg);
  const std::filesystem::path dir(output_dir);
  privrec::write_report_csv(report, (dir / "report.csv").string());
  privrec::write_cdf_csv(report, (dir / "cdf.csv").string());
  privrec::write_by_degree_csv(report, (dir / "by_degree.csv").string());
  privrec::write_config_json(report, (dir / "config.json").string());
  std::cerr << "evaluated " << report.rows.size() << " nodes, skipped "
            << report.skipped_raw_ids.size() << "; wrote " << output_dir
            << "/{report,cdf,by_degree}.csv + config.json\n";
  return 0;
}

int run_bounds(const CommonOpts& o, const std::string& output_dir,
               const std::vector<double>& c_grid) {
  const Graph g = load_input(o.input);
  const auto uspec = make_utility(o.utility, o.gamma, o.max_length);
  const std::vector<double> grid = c_grid.empty() ? std::vector<double>{1.0}
                                                  : c_grid;
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output_dir.empty()) {
    std::filesystem::create_directories(output_dir);
    file.open(std::filesystem::path(output_dir) / "bounds.csv",
              std::ios::binary);
    if (!file) throw privrec::DataError("cannot write bounds.csv");
    out = &file;
  }
  *out << "raw_id,degree,k,t,c_star,ceiling\n";
  for (NodeId r = 0; r < g.node_count(); ++r) {
    const auto bound = privrec::node_accuracy_ceiling(g, r, uspec, o.epsilon, grid);
    if (!bound.has_value()) continue;  // skipped: u_max = 0
    *out << g.raw_label(r) << ',' << g.degree(r) << ',' << bound->k_used << ','
         << bound->t_used << ',' << fmt(bound->c_used) << ','
         << fmt(bound->ceiling) << '\n';
  }
  return 0;
}

int run_compare(const std::string& path_a, const std::string& path_b) {
  const auto a = privrec::read_report_csv(path_a);
  const auto b = privrec::read_report_csv(path_b);
  std::vector<std::pair<const privrec::NodeRow*, const privrec::NodeRow*>> joined;
  {
    std::vector<std::pair<std::uint32_t, const privrec::NodeRow*>> index;
    index.reserve(b.rows.size());
    for (const auto& row : b.rows) index.emplace_back(row.raw_id, &row);
    std::sort(index.begin(), index.end());
    for (const auto& row : a.rows) {
      const auto it = std::lower_bound(
          index.begin(), index.end(),
          std::make_pair(row.raw_id, (const privrec::NodeRow*)nullptr));
      if (it != index.end() && it->first == row.raw_id) {
        joined.emplace_back(&row, it->second);
      }
    }
  }
  std::cout << "rows_a=" << a.rows.size() << " rows_b=" << b.rows.size()
            << " joined=" << joined.size() << '\n';
  const auto summarize = [&](const char* name, auto getter) {
    double mean_abs = 0.0, max_abs = 0.0, mean_delta = 0.0;
    std::uint32_t argmax_raw = 0;
    for (const auto& [ra, rb] : joined) {
      const double d = getter(*ra) - getter(*rb);
      mean_delta += d;
      mean_abs += std::abs(d);
      if (std::abs(d) > max_abs) {
        max_abs = std::abs(d);
        argmax_raw = ra->raw_id;
      }
    }
    const double n = joined.empty() ? 1.0 : static_cast<double>(joined.size());
    std::cout << name << ": mean_delta=" << fmt(mean_delta / n)
              << " mean_abs_delta=" << fmt(mean_abs / n)
              << " max_abs_delta=" << fmt(max_abs) << " at_raw_id="
              << argmax_raw << '\n';
  };
  summarize("acc_exp", [](const privrec::NodeRow& r) { return r.acc_exp; });
  summarize("acc_lap", [](const privrec::NodeRow& r) { return r.acc_lap; });
  summarize("ceiling", [](const privrec::NodeRow& r) { return r.ceiling; });
  return 0;
}

int run_audit(const std::string& mechanism, double epsilon, int max_nodes,
              const std::string& utility, double gamma, int max_length,
              double smoothing_x, bool construction, int workers) {
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#endif
  nlohmann::ordered_json j;
  if (construction) {
    const auto rep = privrec::claim3_construction_audit(max_nodes, workers != 1);
    j["audit"] = "construction";
    j["max_nodes"] = max_nodes;
    nlohmann::ordered_json per_n = nlohmann::ordered_json::array();
    for (const auto& s : rep.per_n) {
      per_n.push_back({{"n", s.n},
                       {"triples", s.triples},
                       {"strict_failures", s.strict_failures},
                       {"strict_failures_dr_pos", s.strict_failures_dr_pos},
                       {"weak_failures", s.weak_failures}});
    }
    j["per_n"] = per_n;
    j["triples"] = rep.triples;
    j["strict_failures"] = rep.strict_failures;
    j["weak_failures"] = rep.weak_failures;
    j["strict_holds"] = rep.strict_failures == 0;
    j["weak_holds"] = rep.weak_failures == 0;
    if (rep.has_counterexample) {
      j["first_strict_counterexample"] = {{"n", rep.first.n},
                                          {"mask", rep.first.mask},
                                          {"target", rep.first.target},
                                          {"x", rep.first.x}};
    }
  } else {
    privrec::AuditConfig cfg;
    if (mechanism == "exp") {
      cfg.mechanism = privrec::AuditMechanism::Exponential;
    } else if (mechanism == "lap") {
      cfg.mechanism = privrec::AuditMechanism::Laplace;
      if (max_nodes > 5) {
        throw std::invalid_argument(
            "laplace audit is quadrature-based; --max-nodes must be <= 5");
      }
    } else {
      cfg.mechanism = privrec::AuditMechanism::Smoothing;
    }
    cfg.epsilon = epsilon;
    cfg.max_nodes = max_nodes;
    cfg.utility = make_utility(utility, gamma, max_length);
    if (!std::isnan(smoothing_x)) cfg.smoothing_x = smoothing_x;
    cfg.parallel = workers != 1;
    const auto rep = privrec::privacy_audit(cfg);
    j["audit"] = "privacy";
    j["mechanism"] = mechanism;
    j["epsilon"] = epsilon;
    j["max_nodes"] = max_nodes;
    j["graphs_checked"] = rep.graphs_checked;
    j["flips_checked"] = rep.flips_checked;
    j["max_ln_ratio"] = rep.max_ln_ratio;
    j["epsilon_ratio"] = rep.max_ln_ratio / epsilon;
    if (cfg.mechanism == privrec::AuditMechanism::Smoothing) {
      j["smoothing_x"] = cfg.smoothing_x;
      j["max_excess_over_bound"] = rep.max_excess_over_bound;
    }
    j["worst"] = {{"n", rep.worst.n},
                  {"mask", rep.worst.mask},
                  {"target", rep.worst.target},
                  {"flip_u", rep.worst.flip.u},
                  {"flip_v", rep.worst.flip.v}};
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privrec: differentially private social recommendations"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_input, ingest_output;
  auto* ingest = app.add_subcommand(
      "ingest", "validate an edge list and write the binary graph cache");
  ingest->add_option("--input", ingest_input, "edge-list or cache file")
      ->required();
  ingest->add_option("--output", ingest_output, "binary cache path to write")
      ->required();

  // stats
  std::string stats_input;
  auto* stats = app.add_subcommand("stats", "print graph summary JSON");
  stats->add_option("--input", stats_input, "graph file")->required();

  // recommend
  CommonOpts rec_opts;
  std::string rec_mechanism = "exp";
  std::uint32_t rec_target = 0;
  double rec_smoothing_x = std::nan("");
  bool rec_explain = false;
  auto* recommend =
      app.add_subcommand("recommend", "run one mechanism for one target node");
  add_common(recommend, rec_opts, true);
  recommend->add_option("--target", rec_target, "target node (raw id)")
      ->required();
  recommend
      ->add_option("--mechanism", rec_mechanism,
                   "mechanism: exp, lap, or smooth")
      ->check(CLI::IsMember({"exp", "lap", "smooth"}))
      ->capture_default_str();
  recommend->add_option("--smoothing-x", rec_smoothing_x,
                        "smoothing weight x in [0,1) (default: from epsilon)");
  recommend->add_flag("--explain", rec_explain,
                      "also print the top-10 selection probabilities as CSV");

  // evaluate
  CommonOpts eval_opts;
  std::string eval_output_dir;
  std::vector<std::string> eval_mechanisms = {"exp", "lap"};
  int eval_trials = 1000;
  std::vector<double> eval_c_grid;
  int eval_workers = 0;
  auto* evaluate = app.add_subcommand(
      "evaluate", "per-node accuracy harness; writes CSV reports");
  add_common(evaluate, eval_opts, true);
  evaluate->add_option("--output-dir", eval_output_dir, "report directory")
      ->required();
  evaluate
      ->add_option("--mechanism", eval_mechanisms,
                   "mechanisms to run (exp, lap); repeat or comma-separate")
      ->delimiter(',')
      ->check(CLI::IsMember({"exp", "lap"}))
      ->capture_default_str();
  evaluate->add_option("--trials", eval_trials, "Laplace Monte Carlo trials")
      ->capture_default_str();
  evaluate->add_option("--c-grid", eval_c_grid,
                       "ceiling c grid, values in (0,1]; default 1.0")
      ->delimiter(',');
  evaluate->add_option("--workers", eval_workers,
                       "worker threads (0 = all available)")
      ->capture_default_str();

  // bounds
  CommonOpts bounds_opts;
  std::string bounds_output_dir;
  std::vector<double> bounds_c_grid;
  auto* bounds = app.add_subcommand(
      "bounds", "per-node accuracy ceilings CSV (stdout or --output-dir)");
  add_common(bounds, bounds_opts, true);
  bounds->add_option("--output-dir", bounds_output_dir,
                     "write bounds.csv here instead of stdout");
  bounds->add_option("--c-grid", bounds_c_grid,
                     "ceiling c grid, values in (0,1]; default 1.0")
      ->delimiter(',');

  // compare
  std::string cmp_a, cmp_b;
  auto* compare = app.add_subcommand(
      "compare", "join two evaluate reports and print summary deltas");
  compare->add_option("report_a", cmp_a, "first report.csv")->required();
  compare->add_option("report_b", cmp_b, "second report.csv")->required();

  // audit
  std::string audit_mechanism = "exp";
  double audit_epsilon = 0.5;
  int audit_max_nodes = 6;
  std::string audit_utility = "cn";
  double audit_gamma = 0.1;
  int audit_max_length = 4;
  double audit_smoothing_x = std::nan("");
  bool audit_construction = false;
  int audit_workers = 0;
  auto* audit = app.add_subcommand(
      "audit", "exhaustive small-graph privacy audit (JSON to stdout)");
  audit
      ->add_option("--mechanism", audit_mechanism,
                   "mechanism: exp, lap, or smooth")
      ->check(CLI::IsMember({"exp", "lap", "smooth"}))
      ->capture_default_str();
  audit->add_option("--epsilon", audit_epsilon, "privacy parameter, > 0")
      ->capture_default_str();
  audit->add_option("--max-nodes", audit_max_nodes,
                    "enumerate graphs on 2..max nodes (<= 7; lap <= 5)")
      ->capture_default_str();
  audit->add_option("--utility", audit_utility, "utility function: cn or wp")
      ->check(CLI::IsMember({"cn", "wp"}))
      ->capture_default_str();
  audit->add_option("--gamma", audit_gamma, "weighted-paths decay")
      ->capture_default_str();
  audit->add_option("--max-length", audit_max_length,
                    "weighted-paths truncation length")
      ->capture_default_str();
  audit->add_option("--smoothing-x", audit_smoothing_x,
                    "smoothing weight x in [0,1) (default 0.5)");
  audit->add_flag("--construction", audit_construction,
                  "audit the zero-utility rewiring construction instead");
  audit->add_option("--workers", audit_workers,
                    "worker threads (0 = all available, 1 = serial)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) return run_ingest(ingest_input, ingest_output);
    if (stats->parsed()) {
      std::cout << privrec::stats_json(load_input(stats_input)) << '\n';
      return 0;
    }
    if (recommend->parsed()) {
      return run_recommend(rec_opts, rec_mechanism, rec_target,
                           rec_smoothing_x, rec_explain);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_opts, eval_output_dir, eval_mechanisms,
                          eval_trials, eval_c_grid, eval_workers);
    }
    if (bounds->parsed()) {
      return run_bounds(bounds_opts, bounds_output_dir, bounds_c_grid);
    }
    if (compare->parsed()) return run_compare(cmp_a, cmp_b);
    if (audit->parsed()) {
      return run_audit(audit_mechanism, audit_epsilon, audit_max_nodes,
                       audit_utility, audit_gamma, audit_max_length,
                       audit_smoothing_x, audit_construction, audit_workers);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
