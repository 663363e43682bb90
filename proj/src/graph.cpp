#include "privrec/graph.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace privrec {

namespace {

constexpr std::array<char, 4> kCacheMagic = {'P', 'R', 'E', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  // The library targets little-endian hosts; a plain byte copy is the format.
  static_assert(std::is_integral_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  static_assert(std::is_integral_v<T>);
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  if (!in) throw DataError("binary cache truncated");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

Graph Graph::from_edges(NodeId n,
                        const std::vector<std::pair<NodeId, NodeId>>& edges,
                        std::vector<std::uint32_t> raw_labels) {
  Graph g;
  g.n_ = n;
  if (raw_labels.empty()) {
    raw_labels.resize(n);
    for (NodeId v = 0; v < n; ++v) raw_labels[v] = v;
  }
  if (raw_labels.size() != n) throw DataError("raw label table size mismatch");
  g.raw_labels_ = std::move(raw_labels);
  for (NodeId v = 0; v < n; ++v) g.raw_to_id_.emplace(g.raw_labels_[v], v);
  if (g.raw_to_id_.size() != n) throw DataError("duplicate raw labels");

  std::vector<std::uint64_t> deg(n + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw DataError("edge endpoint out of range");
    if (u == v) throw DataError("self-loop passed to from_edges");
    ++deg[u];
    ++deg[v];
  }
  g.offsets_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.neighbors_[cursor[u]++] = v;
    g.neighbors_[cursor[v]++] = u;
  }
  for (NodeId v = 0; v < n; ++v) {
    auto* first = g.neighbors_.data() + g.offsets_[v];
    auto* last = g.neighbors_.data() + g.offsets_[v + 1];
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) {
      throw DataError("duplicate edge passed to from_edges");
    }
  }
  g.m_ = edges.size();
  return g;
}

Graph load_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> raw_pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;  // blank line
    if (line[start] == '#') continue;          // comment
    std::istringstream fields(line);
    long long a = 0, b = 0;
    if (!(fields >> a >> b)) {
      throw ParseError(line_no, "expected two integer labels");
    }
    std::string extra;
    if (fields >> extra) {
      throw ParseError(line_no, "expected exactly two fields, got more");
    }
    if (a < 0 || b < 0 || a > 0xffffffffLL || b > 0xffffffffLL) {
      throw ParseError(line_no, "label out of 32-bit range");
    }
    raw_pairs.emplace_back(static_cast<std::uint32_t>(a),
                           static_cast<std::uint32_t>(b));
  }

  // Dense ids in ascending raw-label order.
  std::vector<std::uint32_t> labels;
  labels.reserve(raw_pairs.size() * 2);
  for (const auto& [a, b] : raw_pairs) {
    labels.push_back(a);
    labels.push_back(b);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::unordered_map<std::uint32_t, NodeId> to_id;
  to_id.reserve(labels.size());
  for (NodeId i = 0; i < labels.size(); ++i) to_id.emplace(labels[i], i);

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(raw_pairs.size());
  for (const auto& [a, b] : raw_pairs) {
    if (a == b) continue;  // self-loop dropped
    NodeId u = to_id[a], v = to_id[b];
    if (u > v) std::swap(u, v);
    edges.emplace_back(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const NodeId n = static_cast<NodeId>(labels.size());
  return Graph::from_edges(n, edges, std::move(labels));
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file: " + path);
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const bool is_cache = in.gcount() == 4 && head == kCacheMagic;
  in.clear();
  in.seekg(0);
  if (is_cache) return read_binary_cache(in);
  return load_edge_list(in);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  check_node(u);
  check_node(v);
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::uint32_t Graph::max_degree() const {
  std::uint32_t best = 0;
  for (NodeId v = 0; v < n_; ++v) best = std::max(best, degree(v));
  return best;
}

std::optional<NodeId> Graph::find_raw(std::uint32_t raw_label) const {
  auto it = raw_to_id_.find(raw_label);
  if (it == raw_to_id_.end()) return std::nullopt;
  return it->second;
}

void write_binary_cache(const Graph& g, std::ostream& out) {
  out.write(kCacheMagic.data(), kCacheMagic.size());
  write_le<std::uint32_t>(out, kCacheVersion);
  write_le<std::uint32_t>(out, g.node_count());
  write_le<std::uint64_t>(out, g.edge_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    write_le<std::uint32_t>(out, g.raw_label(v));
  }
  std::uint64_t offset = 0;
  write_le<std::uint64_t>(out, offset);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    offset += g.degree(v);
    write_le<std::uint64_t>(out, offset);
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (NodeId w : g.neighbors(v)) write_le<std::uint32_t>(out, w);
  }
  if (!out) throw DataError("failed to write binary cache");
}

void write_binary_cache_file(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open cache file for writing: " + path);
  write_binary_cache(g, out);
}

Graph read_binary_cache(std::istream& in) {
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  if (!in || head != kCacheMagic) throw DataError("bad cache magic");
  const auto version = read_le<std::uint32_t>(in);
  if (version != kCacheVersion) {
    throw DataError("unsupported cache version " + std::to_string(version));
  }
  Graph g;
  g.n_ = read_le<std::uint32_t>(in);
  g.m_ = read_le<std::uint64_t>(in);
  g.raw_labels_.resize(g.n_);
  for (auto& label : g.raw_labels_) label = read_le<std::uint32_t>(in);
  g.offsets_.resize(static_cast<std::size_t>(g.n_) + 1);
  for (auto& off : g.offsets_) off = read_le<std::uint64_t>(in);
  if (g.offsets_.front() != 0 || g.offsets_.back() != 2 * g.m_) {
    throw DataError("inconsistent cache offsets");
  }
  g.neighbors_.resize(2 * g.m_);
  for (auto& w : g.neighbors_) {
    w = read_le<std::uint32_t>(in);
    if (w >= g.n_) throw DataError("cache neighbor id out of range");
  }
  for (NodeId v = 0; v < g.n_; ++v) g.raw_to_id_.emplace(g.raw_labels_[v], v);
  if (g.raw_to_id_.size() != g.n_) throw DataError("duplicate cache labels");
  return g;
}

std::uint64_t common_neighbor_count(const Graph& g, NodeId u, NodeId v) {
  auto a = g.neighbors(u);
  auto b = g.neighbors(v);
  std::uint64_t count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

std::vector<NodeId> candidate_set(const Graph& g, NodeId r) {
  auto nb = g.neighbors(r);
  std::vector<NodeId> out;
  out.reserve(g.node_count() - 1 - nb.size());
  std::size_t j = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    while (j < nb.size() && nb[j] < v) ++j;
    if (v == r || (j < nb.size() && nb[j] == v)) continue;
    out.push_back(v);
  }
  return out;
}

Graph apply_flip(const Graph& g, const EdgeFlip& f) {
  g.check_node(f.u);
  g.check_node(f.v);
  if (f.u == f.v) throw std::invalid_argument("flip endpoints equal");
  const bool present = g.has_edge(f.u, f.v);
  if (f.add && present) throw std::invalid_argument("flip adds existing edge");
  if (!f.add && !present) throw std::invalid_argument("flip removes absent edge");

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(g.edge_count() + 1);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (NodeId w : g.neighbors(v)) {
      if (v < w) edges.emplace_back(v, w);
    }
  }
  const auto key = std::minmax(f.u, f.v);
  if (f.add) {
    edges.emplace_back(key.first, key.second);
  } else {
    edges.erase(std::find(edges.begin(), edges.end(),
                          std::make_pair(key.first, key.second)));
  }
  std::vector<std::uint32_t> labels(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) labels[v] = g.raw_label(v);
  return Graph::from_edges(g.node_count(), edges, std::move(labels));
}

std::string stats_json(const Graph& g) {
  nlohmann::json j;
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["max_degree"] = g.node_count() ? g.max_degree() : 0;
  // Power-of-two buckets: [0], [1], [2,3], [4,7], ...
  std::vector<std::uint64_t> buckets;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const std::uint32_t d = g.degree(v);
    std::size_t b = 0;
    while ((1u << b) <= d) ++b;  // d=0 -> 0, d=1 -> 1, d in [2,3] -> 2, ...
    if (buckets.size() <= b) buckets.resize(b + 1, 0);
    ++buckets[b];
  }
  auto hist = nlohmann::json::array();
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    if (buckets[b] == 0) continue;
    const std::uint32_t lo = b == 0 ? 0 : (1u << (b - 1));
    hist.push_back({lo, buckets[b]});
  }
  j["degree_histogram"] = hist;
  return j.dump();
}

}  // namespace privrec
