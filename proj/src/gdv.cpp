#include <algorithm>
#include <array>
#include <cstdint>

#include "flatstruct/indicators.hpp"

namespace flatstruct {

namespace {

using Counts = std::vector<std::uint64_t>;

void bump(Counts& counts, NodeId v, int orbit) {
#pragma omp atomic
  ++counts[static_cast<std::size_t>(v) * kOrbitCount + orbit];
}

// Assigns orbits to the members of a connected induced subgraph on 3 or 4
// nodes, identified by edge count and induced degrees.
void record(const Graph& g, const std::array<NodeId, 4>& s, int size, Counts& counts) {
  std::array<int, 4> deg{};
  int edges = 0;
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) {
      if (g.adjacent(s[i], s[j])) {
        ++deg[i];
        ++deg[j];
        ++edges;
      }
    }
  }
  if (size == 3) {
    for (int i = 0; i < 3; ++i) bump(counts, s[i], edges == 3 ? 3 : (deg[i] == 2 ? 2 : 1));
    return;
  }
  const int max_deg = *std::max_element(deg.begin(), deg.end());
  for (int i = 0; i < 4; ++i) {
    int orbit = 0;
    switch (edges) {
      case 3:
        if (max_deg == 3) {
          orbit = deg[i] == 3 ? 7 : 6;  // claw
        } else {
          orbit = deg[i] == 1 ? 4 : 5;  // 4-path
        }
        break;
      case 4:
        if (max_deg == 2) {
          orbit = 8;  // 4-cycle
        } else {
          orbit = deg[i] == 1 ? 9 : (deg[i] == 2 ? 10 : 11);  // paw
        }
        break;
      case 5:
        orbit = deg[i] == 2 ? 12 : 13;  // diamond
        break;
      default:
        orbit = 14;
    }
    bump(counts, s[i], orbit);
  }
}

bool in_closed_neighborhood(const Graph& g, NodeId u, const std::array<NodeId, 4>& s, int size) {
  for (int i = 0; i < size; ++i) {
    if (s[i] == u || g.adjacent(s[i], u)) return true;
  }
  return false;
}

// ESU: every connected set is reached exactly once, rooted at its smallest id.
void extend(const Graph& g, std::array<NodeId, 4>& s, int size, std::vector<NodeId> ext,
            NodeId root, Counts& counts) {
  if (size >= 3) record(g, s, size, counts);
  if (size == 4) return;
  while (!ext.empty()) {
    const NodeId w = ext.back();
    ext.pop_back();
    std::vector<NodeId> next = ext;
    for (NodeId u : g.neighbors(w)) {
      if (u > root && !in_closed_neighborhood(g, u, s, size)) next.push_back(u);
    }
    s[size] = w;
    extend(g, s, size + 1, std::move(next), root, counts);
  }
}

}  // namespace

IndicatorTable gdv(const Graph& g) {
  const std::size_t n = g.node_count();
  Counts counts(n * kOrbitCount, 0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(n); ++ri) {
    const auto root = static_cast<NodeId>(ri);
    std::vector<NodeId> ext;
    for (NodeId u : g.neighbors(root)) {
      if (u > root) ext.push_back(u);
    }
    std::array<NodeId, 4> s{root, 0, 0, 0};
    extend(g, s, 1, std::move(ext), root, counts);
  }
  IndicatorTable t;
  t.name = "gdv";
  t.width = kOrbitCount;
  t.vector = true;
  t.values.resize(counts.size());
  for (NodeId v = 0; v < n; ++v) counts[v * kOrbitCount] = g.degree(v);
  std::transform(counts.begin(), counts.end(), t.values.begin(),
                 [](std::uint64_t c) { return static_cast<double>(c); });
  return t;
}

}  // namespace flatstruct
