#include "flatstruct/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "flatstruct/parallel.hpp"

namespace flatstruct {

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges,
                        std::vector<std::string> labels, EdgeCleanup* cleanup) {
  if (!labels.empty() && labels.size() != node_count) {
    throw std::invalid_argument("label count does not match node count");
  }
  Graph g;
  if (labels.empty()) {
    labels.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) labels.push_back(std::to_string(i));
  }
  g.labels_ = std::move(labels);

  EdgeCleanup seen;
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (u == v) {
      ++seen.self_loops;
      continue;
    }
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  const auto last = std::unique(canon.begin(), canon.end());
  seen.duplicate_edges = static_cast<std::size_t>(canon.end() - last);
  canon.erase(last, canon.end());
  if (cleanup) *cleanup = seen;

  std::vector<std::size_t> deg(node_count, 0);
  for (auto [u, v] : canon) {
    ++deg[u];
    ++deg[v];
  }
  g.offsets_.assign(node_count + 1, 0);
  for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.targets_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // canon is sorted by (u, v), so pushing in order yields sorted lists.
  for (auto [u, v] : canon) g.targets_[fill[u]++] = v;
  for (auto [u, v] : canon) g.targets_[fill[v]++] = u;
  for (std::size_t i = 0; i < node_count; ++i) {
    std::sort(g.targets_.begin() + g.offsets_[i], g.targets_.begin() + g.offsets_[i + 1]);
  }

  g.index_.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    if (!g.index_.emplace(g.labels_[i], static_cast<NodeId>(i)).second) {
      throw std::invalid_argument("duplicate node label '" + g.labels_[i] + "'");
    }
  }
  return g;
}

bool Graph::adjacent(NodeId u, NodeId v) const {
  if (degree(u) > degree(v)) std::swap(u, v);
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::optional<NodeId> Graph::find(std::string_view label) const {
  const auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

EdgeListFile read_edge_list(std::istream& in) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& token) {
    auto [it, inserted] = ids.emplace(token, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a)) continue;
    if (a.front() == '#') continue;
    if (!(tokens >> b) || (tokens >> extra)) {
      throw ParseError("edge list line " + std::to_string(line_no) +
                       ": expected exactly two node labels");
    }
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    edges.emplace_back(u, v);
  }
  EdgeListFile out;
  const std::size_t n = labels.size();
  out.graph = Graph::from_edges(n, edges, std::move(labels), &out.cleanup);
  return out;
}

EdgeListFile load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read edge list " + path.string());
  return read_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_edge_list(g, out);
}

namespace {

// Depth-limited BFS from x; calls visit(node, depth) in BFS order.
// `mark` must be sized to the node count; `stamp` distinguishes calls.
template <typename Visit>
void bounded_bfs(const Graph& g, NodeId x, std::uint32_t max_depth,
                 std::vector<std::uint32_t>& mark, std::uint32_t stamp,
                 std::vector<NodeId>& frontier, std::vector<NodeId>& next, Visit&& visit) {
  frontier.assign(1, x);
  mark[x] = stamp;
  visit(x, 0u);
  for (std::uint32_t depth = 1; depth <= max_depth && !frontier.empty(); ++depth) {
    next.clear();
    for (NodeId u : frontier) {
      for (NodeId w : g.neighbors(u)) {
        if (mark[w] == stamp) continue;
        mark[w] = stamp;
        next.push_back(w);
        visit(w, depth);
      }
    }
    frontier.swap(next);
  }
}

}  // namespace

KHopIndex::KHopIndex(const Graph& g, int k_star) : k_star_(k_star), node_count_(g.node_count()) {
  if (k_star < 0) throw std::invalid_argument("k_star must be >= 0");
  const std::size_t n = g.node_count();
  const std::size_t layers = static_cast<std::size_t>(k_star) + 1;
  std::vector<std::vector<NodeId>> per_node(n);
  std::vector<std::vector<std::uint32_t>> counts(n);

#pragma omp parallel
  {
    std::vector<std::uint32_t> mark(n, 0);
    std::vector<NodeId> frontier, next;
    std::uint32_t stamp = 0;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(n); ++xi) {
      const auto x = static_cast<NodeId>(xi);
      auto& ids = per_node[x];
      auto& cnt = counts[x];
      cnt.assign(layers, 0);
      bounded_bfs(g, x, static_cast<std::uint32_t>(k_star), mark, ++stamp, frontier, next,
                  [&](NodeId v, std::uint32_t depth) {
                    ids.push_back(v);
                    ++cnt[depth];
                  });
      // BFS emits layers contiguously; sort within each layer.
      std::size_t begin = 0;
      for (std::size_t k = 0; k < layers; ++k) {
        std::sort(ids.begin() + begin, ids.begin() + begin + cnt[k]);
        begin += cnt[k];
      }
    }
  }

  offsets_.assign(n * layers + 1, 0);
  std::size_t total = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t k = 0; k < layers; ++k) {
      offsets_[x * layers + k] = total;
      total += counts[x][k];
    }
  }
  offsets_[n * layers] = total;
  ids_.reserve(total);
  for (auto& ids : per_node) ids_.insert(ids_.end(), ids.begin(), ids.end());
}

KHopIndex khop_neighborhoods(const Graph& g, int k_star) { return KHopIndex(g, k_star); }

std::vector<std::uint32_t> shortest_path_lengths(const Graph& g, NodeId source) {
  if (source >= g.node_count()) throw std::out_of_range("source node out of range");
  std::vector<std::uint32_t> dist(g.node_count(), kUnreachable);
  std::vector<NodeId> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] != kUnreachable) continue;
      dist[w] = dist[u] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

DistanceMatrix::DistanceMatrix(const Graph& g) : n_(g.node_count()), dist_(n_ * n_, kUnreachable) {
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(n_); ++s) {
    const auto row = shortest_path_lengths(g, static_cast<NodeId>(s));
    std::copy(row.begin(), row.end(), dist_.begin() + s * n_);
  }
}

Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<std::uint32_t> local(g.node_count(), kUnreachable);
  std::vector<std::string> labels;
  labels.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    local[nodes[i]] = static_cast<std::uint32_t>(i);
    labels.push_back(g.label(nodes[i]));
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (NodeId w : g.neighbors(nodes[i])) {
      if (local[w] != kUnreachable && local[w] > i) {
        edges.emplace_back(static_cast<NodeId>(i), local[w]);
      }
    }
  }
  return Graph::from_edges(nodes.size(), edges, std::move(labels));
}

std::vector<NodeId> sample_nodes(std::size_t node_count, std::size_t count, std::uint64_t seed) {
  if (count > node_count) throw std::invalid_argument("sample larger than node count");
  std::vector<NodeId> all(node_count);
  std::iota(all.begin(), all.end(), NodeId{0});
  std::mt19937_64 rng(mix64(seed));
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, node_count - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace flatstruct
