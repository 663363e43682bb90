#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "privrec/graph.hpp"
#include "test_util.hpp"

namespace {

using privrec::Graph;
using privrec::NodeId;
using testutil::TempDir;

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return privrec::load_edge_list(in);
}

TEST(GraphParse, CommentsBlanksAndTabs) {
  const Graph g = parse(
      "# Directed graph (each unordered pair of nodes is saved once)\n"
      "# FromNodeId\tToNodeId\n"
      "\n"
      "0\t1\n"
      "1 2\n"
      "   \t\n"
      "2\t0\n");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
}

TEST(GraphParse, DirectedPairsFoldAndDuplicatesCollapse) {
  const Graph g = parse("0 1\n1 0\n0 1\n1 2\n");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(GraphParse, SelfLoopsDropped) {
  const Graph g = parse("0 0\n0 1\n1 1\n");
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(GraphParse, DenseIdsAssignedInAscendingRawOrder) {
  const Graph g = parse("30 10\n20 30\n");
  ASSERT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.raw_label(0), 10u);
  EXPECT_EQ(g.raw_label(1), 20u);
  EXPECT_EQ(g.raw_label(2), 30u);
  EXPECT_EQ(g.find_raw(20), NodeId{1});
  EXPECT_EQ(g.find_raw(99), std::nullopt);
  // 30 connects to both 10 and 20.
  EXPECT_EQ(g.degree(2), 2u);
}

TEST(GraphParse, ErrorsCarryLineNumbers) {
  try {
    parse("0 1\n1 2\nfoo bar\n");
    FAIL() << "expected ParseError";
  } catch (const privrec::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse("0 1 2\n");
    FAIL() << "expected ParseError";
  } catch (const privrec::ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(parse("0 -1\n"), privrec::ParseError);
  EXPECT_THROW(parse("0 4294967296\n"), privrec::ParseError);
  EXPECT_THROW(parse("0\n"), privrec::ParseError);
}

TEST(GraphParse, SingleTokenAndTrailingGarbageRejected) {
  EXPECT_THROW(parse("1 2\n3\n"), privrec::ParseError);
  EXPECT_THROW(parse("1 2 extra\n"), privrec::ParseError);
  EXPECT_THROW(parse("1 2x\n"), privrec::ParseError);
}

TEST(GraphCore, NeighborsSortedAndDegreesConsistent) {
  const Graph g = testutil::gnp_graph(40, 0.2, 11);
  std::uint64_t twice_m = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto nb = g.neighbors(v);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    EXPECT_EQ(nb.size(), g.degree(v));
    twice_m += nb.size();
    for (NodeId w : nb) EXPECT_TRUE(g.has_edge(w, v));
  }
  EXPECT_EQ(twice_m, 2 * g.edge_count());
  std::uint32_t dmax = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) dmax = std::max(dmax, g.degree(v));
  EXPECT_EQ(dmax, g.max_degree());
}

TEST(GraphCore, CandidateSetExcludesSelfAndNeighbors) {
  const Graph g = testutil::gnp_graph(25, 0.3, 5);
  for (NodeId r = 0; r < g.node_count(); ++r) {
    const auto cands = privrec::candidate_set(g, r);
    std::set<NodeId> expect;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (v != r && !g.has_edge(v, r)) expect.insert(v);
    }
    EXPECT_EQ(std::vector<NodeId>(expect.begin(), expect.end()), cands);
  }
}

TEST(GraphCore, CommonNeighborCountMatchesNaive) {
  const Graph g = testutil::gnp_graph(30, 0.25, 17);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
      std::uint64_t naive = 0;
      for (NodeId w = 0; w < g.node_count(); ++w) {
        if (g.has_edge(u, w) && g.has_edge(v, w)) ++naive;
      }
      EXPECT_EQ(privrec::common_neighbor_count(g, u, v), naive);
    }
  }
}

TEST(GraphCore, FromEdgesValidation) {
  using E = std::vector<std::pair<NodeId, NodeId>>;
  EXPECT_THROW(Graph::from_edges(3, E{{0, 3}}), privrec::DataError);
  EXPECT_THROW(Graph::from_edges(3, E{{1, 1}}), privrec::DataError);
  EXPECT_THROW(Graph::from_edges(3, E{{0, 1}, {1, 0}}), privrec::DataError);
  EXPECT_THROW(Graph::from_edges(2, E{}, {5, 5}), privrec::DataError);
  EXPECT_THROW(Graph::from_edges(2, E{}, {1, 2, 3}), privrec::DataError);
}

TEST(GraphFlip, AddAndRemove) {
  const Graph g = testutil::path_graph(4);  // 0-1-2-3
  const Graph added = privrec::apply_flip(g, {0, 2, /*add=*/true});
  EXPECT_TRUE(added.has_edge(0, 2));
  EXPECT_EQ(added.edge_count(), g.edge_count() + 1);
  const Graph removed = privrec::apply_flip(g, {1, 2, /*add=*/false});
  EXPECT_FALSE(removed.has_edge(1, 2));
  EXPECT_EQ(removed.edge_count(), g.edge_count() - 1);
  // Original untouched; labels preserved.
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_EQ(removed.raw_label(3), g.raw_label(3));
}

TEST(GraphFlip, RejectsInconsistentFlip) {
  const Graph g = testutil::path_graph(4);
  EXPECT_THROW(privrec::apply_flip(g, {0, 1, /*add=*/true}),
               std::invalid_argument);
  EXPECT_THROW(privrec::apply_flip(g, {0, 2, /*add=*/false}),
               std::invalid_argument);
  EXPECT_THROW(privrec::apply_flip(g, {0, 0, /*add=*/true}),
               std::invalid_argument);
}

TEST(GraphCache, RoundTripPreservesEverything) {
  const Graph g = parse("5 9\n9 7\n7 5\n5 100\n");
  TempDir tmp;
  const std::string path = tmp.file("g.bin");
  privrec::write_binary_cache_file(g, path);
  const Graph h = privrec::load_graph_file(path);
  ASSERT_EQ(h.node_count(), g.node_count());
  ASSERT_EQ(h.edge_count(), g.edge_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    EXPECT_EQ(h.raw_label(v), g.raw_label(v));
    const auto a = g.neighbors(v), b = h.neighbors(v);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST(GraphCache, SniffsTextVsBinary) {
  TempDir tmp;
  const std::string text_path = tmp.file("g.txt");
  testutil::write_file(text_path, "0 1\n1 2\n");
  const Graph from_text = privrec::load_graph_file(text_path);
  EXPECT_EQ(from_text.node_count(), 3u);
  const std::string bin_path = tmp.file("g.bin");
  privrec::write_binary_cache_file(from_text, bin_path);
  const Graph from_bin = privrec::load_graph_file(bin_path);
  EXPECT_EQ(from_bin.edge_count(), 2u);
}

TEST(GraphCache, TruncatedAndCorruptCachesRejected) {
  const Graph g = testutil::gnp_graph(10, 0.3, 3);
  TempDir tmp;
  const std::string path = tmp.file("g.bin");
  privrec::write_binary_cache_file(g, path);
  std::string bytes = testutil::read_file(path);
  // Truncate.
  testutil::write_file(path, bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(privrec::load_graph_file(path), privrec::DataError);
  // Corrupt the version field (bytes 4..7).
  std::string bad_version = bytes;
  bad_version[4] = static_cast<char>(0x7f);
  testutil::write_file(path, bad_version);
  EXPECT_THROW(privrec::load_graph_file(path), privrec::DataError);
  EXPECT_THROW(privrec::load_graph_file(tmp.file("missing.bin")),
               privrec::DataError);
}

TEST(GraphStats, JsonShape) {
  const Graph g = parse("0 1\n0 2\n1 2\n1 3\n2 3\n3 4\n");
  const auto j = nlohmann::json::parse(privrec::stats_json(g));
  EXPECT_EQ(j["nodes"], 5);
  EXPECT_EQ(j["edges"], 6);
  EXPECT_EQ(j["max_degree"], 3);
  // Degrees: 2,3,3,3,1 -> bucket [1]: 1 node, bucket [2,3]: 4 nodes.
  const auto hist = j["degree_histogram"];
  ASSERT_EQ(hist.size(), 2u);
  EXPECT_EQ(hist[0][0], 1);
  EXPECT_EQ(hist[0][1], 1);
  EXPECT_EQ(hist[1][0], 2);
  EXPECT_EQ(hist[1][1], 4);
}

TEST(GraphStats, IsolatedStarExtremes) {
  const Graph star = testutil::star_graph(6);
  const auto j = nlohmann::json::parse(privrec::stats_json(star));
  EXPECT_EQ(j["max_degree"], 5);
  const Graph empty = Graph::from_edges(3, {});
  const auto je = nlohmann::json::parse(privrec::stats_json(empty));
  EXPECT_EQ(je["edges"], 0);
  EXPECT_EQ(je["max_degree"], 0);
}

}  // namespace
