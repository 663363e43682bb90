// Immutable undirected simple graph with CSR adjacency, SNAP-style edge-list
// ingestion, and a compact binary cache format.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace privrec {

using NodeId = std::uint32_t;

// Thrown for malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Thrown for unreadable files, bad cache headers, and similar data problems.
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EdgeFlip {
  NodeId u = 0;
  NodeId v = 0;
  bool add = true;  // true: edge absent in the source graph; false: present
};

class Graph {
 public:
  Graph() = default;

  // Builds from deduplicated undirected edges over dense ids [0, n).
  // raw_labels maps dense id -> original label (identity if empty).
  static Graph from_edges(NodeId n,
                          const std::vector<std::pair<NodeId, NodeId>>& edges,
                          std::vector<std::uint32_t> raw_labels = {});

  NodeId node_count() const { return n_; }
  std::uint64_t edge_count() const { return m_; }

  std::uint32_t degree(NodeId v) const {
    check_node(v);
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }

  // Sorted neighbor list.
  std::span<const NodeId> neighbors(NodeId v) const {
    check_node(v);
    return {neighbors_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }

  bool has_edge(NodeId u, NodeId v) const;
  std::uint32_t max_degree() const;

  std::uint32_t raw_label(NodeId v) const {
    check_node(v);
    return raw_labels_[v];
  }
  std::optional<NodeId> find_raw(std::uint32_t raw_label) const;

  void check_node(NodeId v) const {
    if (v >= n_) throw std::out_of_range("node id out of range");
  }

 private:
  NodeId n_ = 0;
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> offsets_;   // size n_ + 1
  std::vector<NodeId> neighbors_;        // size 2 m_, sorted per row
  std::vector<std::uint32_t> raw_labels_;
  std::unordered_map<std::uint32_t, NodeId> raw_to_id_;

  friend Graph read_binary_cache(std::istream& in);
};

// Parses SNAP-style edge-list text: '#' comment lines; data lines hold two
// whitespace-separated nonnegative integer labels (a directed pair).  Directed
// pairs fold into undirected edges; duplicates (either orientation) collapse;
// self-loops are dropped; labels are remapped to dense ids in ascending label
// order.
Graph load_edge_list(std::istream& in);

// Loads either edge-list text or the binary cache (sniffs the magic bytes).
Graph load_graph_file(const std::string& path);

// Binary cache: magic "PREC", u32 version=1, u32 n, u64 m, u32 raw_labels[n],
// u64 offsets[n+1], u32 neighbors[2m]; all little-endian.
void write_binary_cache(const Graph& g, std::ostream& out);
void write_binary_cache_file(const Graph& g, const std::string& path);
Graph read_binary_cache(std::istream& in);

std::uint64_t common_neighbor_count(const Graph& g, NodeId u, NodeId v);

// V \ ({r} union N(r)) in ascending id order.
std::vector<NodeId> candidate_set(const Graph& g, NodeId r);

// Returns a new graph differing from g in exactly the flipped edge.
Graph apply_flip(const Graph& g, const EdgeFlip& f);

// {"nodes":..,"edges":..,"max_degree":..,"degree_histogram":[[min_degree,count],..]}
// with power-of-two degree buckets.
std::string stats_json(const Graph& g);

}  // namespace privrec
