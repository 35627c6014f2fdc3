#include "flatstruct/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "flatstruct/parallel.hpp"

namespace flatstruct {

namespace {

// Zachary (1977), 1-based member numbers.
constexpr std::array<std::array<int, 2>, 78> kKarateEdges{{
    {1, 2},   {1, 3},   {1, 4},   {1, 5},   {1, 6},   {1, 7},   {1, 8},   {1, 9},
    {1, 11},  {1, 12},  {1, 13},  {1, 14},  {1, 18},  {1, 20},  {1, 22},  {1, 32},
    {2, 3},   {2, 4},   {2, 8},   {2, 14},  {2, 18},  {2, 20},  {2, 22},  {2, 31},
    {3, 4},   {3, 8},   {3, 9},   {3, 10},  {3, 14},  {3, 28},  {3, 29},  {3, 33},
    {4, 8},   {4, 13},  {4, 14},  {5, 7},   {5, 11},  {6, 7},   {6, 11},  {6, 17},
    {7, 17},  {9, 31},  {9, 33},  {9, 34},  {10, 34}, {14, 34}, {15, 33}, {15, 34},
    {16, 33}, {16, 34}, {19, 33}, {19, 34}, {20, 34}, {21, 33}, {21, 34}, {23, 33},
    {23, 34}, {24, 26}, {24, 28}, {24, 30}, {24, 33}, {24, 34}, {25, 26}, {25, 28},
    {25, 32}, {26, 32}, {27, 30}, {27, 34}, {28, 34}, {29, 32}, {29, 34}, {30, 33},
    {30, 34}, {31, 33}, {31, 34}, {32, 33}, {32, 34}, {33, 34},
}};

constexpr int kKarateNodes = 34;

// mirror_label[L] for L in 1..34.
std::array<int, kKarateNodes + 1> build_mirror_labels() {
  std::array<int, kKarateNodes + 1> mirror{};
  constexpr std::array<std::array<int, 2>, 9> pinned{{
      {1, 37}, {2, 38}, {3, 39}, {12, 67}, {17, 52}, {25, 44}, {26, 57}, {33, 51}, {34, 42},
  }};
  std::array<bool, 2 * kKarateNodes + 1> used{};
  for (auto [orig, mir] : pinned) {
    mirror[orig] = mir;
    used[mir] = true;
  }
  int next = kKarateNodes + 1;
  for (int orig = 1; orig <= kKarateNodes; ++orig) {
    if (mirror[orig] != 0) continue;
    while (used[next]) ++next;
    mirror[orig] = next;
    used[next] = true;
  }
  return mirror;
}

const std::array<NodeId, 2 * kKarateNodes>& mirror_table() {
  static const auto table = [] {
    const auto labels = build_mirror_labels();
    std::array<NodeId, 2 * kKarateNodes> t{};
    for (int orig = 1; orig <= kKarateNodes; ++orig) {
      const auto a = static_cast<NodeId>(orig - 1);
      const auto b = static_cast<NodeId>(labels[orig] - 1);
      t[a] = b;
      t[b] = a;
    }
    return t;
  }();
  return table;
}

std::vector<std::string> numbered_labels(std::size_t n, int first) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(first + static_cast<int>(i)));
  return labels;
}

}  // namespace

Graph karate_club() {
  std::vector<Edge> edges;
  for (auto [a, b] : kKarateEdges) edges.emplace_back(a - 1, b - 1);
  return Graph::from_edges(kKarateNodes, edges, numbered_labels(kKarateNodes, 1));
}

NodeId karate_mirror(NodeId v) {
  if (v >= 2 * kKarateNodes) throw std::out_of_range("not a mirrored-karate node");
  return mirror_table()[v];
}

Graph generate_mirrored_karate() {
  const auto& mirror = mirror_table();
  std::vector<Edge> edges;
  edges.reserve(2 * kKarateEdges.size() + 1);
  for (auto [a, b] : kKarateEdges) {
    const auto u = static_cast<NodeId>(a - 1);
    const auto v = static_cast<NodeId>(b - 1);
    edges.emplace_back(u, v);
    edges.emplace_back(mirror[u], mirror[v]);
  }
  edges.emplace_back(kKarateBridgeA, kKarateBridgeB);
  return Graph::from_edges(2 * kKarateNodes, edges, numbered_labels(2 * kKarateNodes, 1));
}

Graph generate_barbell(int clique_size, int path_len) {
  if (clique_size < 3) throw std::invalid_argument("barbell clique size must be >= 3");
  if (path_len < 1) throw std::invalid_argument("barbell path length must be >= 1");
  const auto m = static_cast<NodeId>(clique_size);
  const auto len = static_cast<NodeId>(path_len);
  const NodeId b0 = m + len;
  std::vector<Edge> edges;
  for (NodeId i = 0; i < m; ++i) {
    for (NodeId j = i + 1; j < m; ++j) {
      edges.emplace_back(i, j);
      edges.emplace_back(b0 + i, b0 + j);
    }
  }
  for (NodeId i = 0; i + 1 < len; ++i) edges.emplace_back(m + i, m + i + 1);
  edges.emplace_back(m - 1, m);
  edges.emplace_back(m + len - 1, b0);
  return Graph::from_edges(2 * m + len, edges);
}

BarbellConnectors barbell_connectors(int clique_size, int path_len) {
  return {static_cast<NodeId>(clique_size - 1), static_cast<NodeId>(clique_size + path_len)};
}

Graph erdos_renyi(std::size_t n, double avg_degree, std::uint64_t seed) {
  std::vector<Edge> edges;
  if (n >= 2 && avg_degree > 0) {
    const double p = std::min(1.0, avg_degree / static_cast<double>(n - 1));
    std::mt19937_64 rng(mix64(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (p >= 1.0) {
      for (NodeId v = 1; v < n; ++v)
        for (NodeId w = 0; w < v; ++w) edges.emplace_back(w, v);
    } else {
      // Batagelj-Brandes skipping over the lower triangle.
      const double log_q = std::log1p(-p);
      std::int64_t v = 1, w = -1;
      while (v < static_cast<std::int64_t>(n)) {
        const double r = unit(rng);
        w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
        while (w >= v && v < static_cast<std::int64_t>(n)) {
          w -= v;
          ++v;
        }
        if (v < static_cast<std::int64_t>(n)) {
          edges.emplace_back(static_cast<NodeId>(w), static_cast<NodeId>(v));
        }
      }
    }
  }
  return Graph::from_edges(n, edges);
}

Graph preferential_attachment(std::size_t n, std::size_t links, std::uint64_t seed) {
  if (links == 0 || n <= links) throw std::invalid_argument("need n > links >= 1");
  std::mt19937_64 rng(mix64(seed));
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;  // each node repeated once per incident edge
  // Seed with a clique on links+1 nodes.
  for (NodeId i = 0; i <= links; ++i) {
    for (NodeId j = i + 1; j <= links; ++j) {
      edges.emplace_back(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  std::vector<NodeId> chosen;
  for (auto v = static_cast<NodeId>(links + 1); v < n; ++v) {
    chosen.clear();
    while (chosen.size() < links) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      const NodeId t = endpoints[pick(rng)];
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
    }
    for (NodeId t : chosen) {
      edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace flatstruct
