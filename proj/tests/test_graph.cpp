#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "flatstruct/generators.hpp"
#include "flatstruct/graph.hpp"

using namespace flatstruct;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

// Floyd-Warshall; independent of the BFS code under test.
std::vector<std::vector<std::uint32_t>> all_pairs_oracle(const Graph& g) {
  const std::size_t n = g.node_count();
  const std::uint32_t inf = kUnreachable / 2;
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, inf));
  for (NodeId u = 0; u < n; ++u) {
    d[u][u] = 0;
    for (NodeId v : g.neighbors(u)) d[u][v] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& x : row)
      if (x >= inf) x = kUnreachable;
  return d;
}

}  // namespace

TEST(EdgeList, KarateFileLoads) {
  std::ostringstream body;
  body << "# zachary\n";
  write_edge_list(karate_club(), body);
  const auto loaded = load_edge_list(temp_file("karate_test.edgelist", body.str()));
  EXPECT_EQ(loaded.graph.node_count(), 34u);
  EXPECT_EQ(loaded.graph.edge_count(), 78u);
}

TEST(EdgeList, EmptyFile) {
  const auto loaded = load_edge_list(temp_file("empty.edgelist", ""));
  EXPECT_EQ(loaded.graph.node_count(), 0u);
  EXPECT_EQ(loaded.graph.edge_count(), 0u);
}

TEST(EdgeList, DuplicatesAndSelfLoopsDropped) {
  std::istringstream in("a b\na b\nb a\nc c\n");
  const auto loaded = read_edge_list(in);
  EXPECT_EQ(loaded.graph.node_count(), 3u);
  EXPECT_EQ(loaded.graph.edge_count(), 1u);
  EXPECT_EQ(loaded.cleanup.duplicate_edges, 2u);
  EXPECT_EQ(loaded.cleanup.self_loops, 1u);
  EXPECT_EQ(loaded.graph.label(0), "a");
  EXPECT_EQ(*loaded.graph.find("c"), 2u);
}

TEST(EdgeList, BadLineNamesLineNumber) {
  std::istringstream in("a b\n# fine\nc d e\n");
  try {
    read_edge_list(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(load_edge_list("/nonexistent/file.edgelist"), std::runtime_error);
}

TEST(Generators, MirroredKarateShape) {
  const Graph g = generate_mirrored_karate();
  EXPECT_EQ(g.node_count(), 68u);
  EXPECT_EQ(g.edge_count(), 157u);
  EXPECT_TRUE(g.adjacent(*g.find("1"), *g.find("37")));
  EXPECT_EQ(g.degree(*g.find("12")), 1u);
  EXPECT_EQ(g.degree(*g.find("67")), 1u);
  for (NodeId v = 0; v < 68; ++v) {
    EXPECT_EQ(karate_mirror(karate_mirror(v)), v);
    EXPECT_NE(karate_mirror(v), v);
    if (v == kKarateBridgeA || v == kKarateBridgeB) continue;
    EXPECT_EQ(g.degree(v), g.degree(karate_mirror(v))) << g.label(v);
  }
  for (auto [u, v] : g.edges()) EXPECT_TRUE(g.adjacent(karate_mirror(u), karate_mirror(v)));
  EXPECT_EQ(karate_mirror(*g.find("34")), *g.find("42"));
  EXPECT_EQ(karate_mirror(*g.find("26")), *g.find("57"));
}

TEST(Generators, Barbell) {
  const Graph g = generate_barbell(10, 10);
  EXPECT_EQ(g.node_count(), 30u);
  EXPECT_EQ(g.edge_count(), 101u);
  const auto [ca, cb] = barbell_connectors(10, 10);
  EXPECT_EQ(g.degree(ca), 10u);
  EXPECT_EQ(g.degree(cb), 10u);
  EXPECT_EQ(g.degree(0), 9u);
  EXPECT_EQ(g.degree(14), 2u);

  const Graph small = generate_barbell(3, 1);
  EXPECT_EQ(small.node_count(), 7u);
  EXPECT_EQ(small.edge_count(), 8u);
  EXPECT_THROW(generate_barbell(2, 5), std::invalid_argument);
  EXPECT_THROW(generate_barbell(5, 0), std::invalid_argument);
}

TEST(Generators, DegreeSumIsTwiceEdges) {
  for (const Graph& g : {erdos_renyi(500, 6.0, 3), preferential_attachment(300, 3, 4),
                         generate_mirrored_karate(), random_graph(80, 0.1, 9)}) {
    std::size_t total = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) total += g.degree(v);
    EXPECT_EQ(total, 2 * g.edge_count());
  }
  const Graph er = erdos_renyi(2000, 8.0, 11);
  const double avg = 2.0 * er.edge_count() / er.node_count();
  EXPECT_NEAR(avg, 8.0, 0.5);
}

TEST(KHop, SmallExample) {
  // x - a - e, x - b - d, a - b; y hangs off e.
  std::istringstream in("x a\nx b\na b\na e\nb d\ne y\n");
  const Graph g = read_edge_list(in).graph;
  const KHopIndex idx(g, 3);
  const NodeId x = *g.find("x");
  auto names = [&](int k) {
    std::vector<std::string> out;
    for (NodeId v : idx.layer(x, k)) out.push_back(g.label(v));
    std::sort(out.begin(), out.end());
    return out;
  };
  EXPECT_EQ(names(0), std::vector<std::string>{"x"});
  EXPECT_EQ(names(1), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(names(2), (std::vector<std::string>{"d", "e"}));
  EXPECT_EQ(names(3), std::vector<std::string>{"y"});
}

TEST(KHop, BarbellConnector) {
  const Graph g = generate_barbell(10, 10);
  const KHopIndex idx(g, 2);
  EXPECT_EQ(idx.layer(barbell_connectors(10, 10).a, 1).size(), 10u);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    ASSERT_EQ(idx.layer(v, 0).size(), 1u);
    EXPECT_EQ(idx.layer(v, 0)[0], v);
  }
}

TEST(KHop, MatchesAllPairsOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 5 + rng() % 196;
    const double p = 1.5 / n + (rng() % 100) / 100.0 * 4.0 / n;
    const Graph g = random_graph(n, p, rng());
    const int k_star = static_cast<int>(rng() % 5);
    const KHopIndex idx(g, k_star);
    const auto d = all_pairs_oracle(g);
    for (NodeId x = 0; x < n; ++x) {
      std::vector<NodeId> ball;
      for (int k = 0; k <= k_star; ++k) {
        const auto layer = idx.layer(x, k);
        EXPECT_TRUE(std::is_sorted(layer.begin(), layer.end()));
        for (NodeId y : layer) {
          EXPECT_EQ(d[x][y], static_cast<std::uint32_t>(k));
          ball.push_back(y);
        }
      }
      std::sort(ball.begin(), ball.end());
      EXPECT_TRUE(std::adjacent_find(ball.begin(), ball.end()) == ball.end());
      std::vector<NodeId> expected;
      for (NodeId y = 0; y < n; ++y)
        if (d[x][y] != kUnreachable && d[x][y] <= static_cast<std::uint32_t>(k_star))
          expected.push_back(y);
      EXPECT_EQ(ball, expected);
    }
  }
}

TEST(KHop, MirroredKarateDegreeMultisets) {
  const Graph g = generate_mirrored_karate();
  const KHopIndex idx(g, 4);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (v == kKarateBridgeA || v == kKarateBridgeB) continue;
    for (int k = 0; k <= 4; ++k) {
      std::vector<std::size_t> a, b;
      for (NodeId u : idx.layer(v, k)) a.push_back(g.degree(u));
      for (NodeId u : idx.layer(karate_mirror(v), k)) b.push_back(g.degree(u));
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      EXPECT_EQ(a, b);
    }
  }
}

TEST(ShortestPaths, Basics) {
  const Graph g = generate_barbell(10, 10);
  const auto [ca, cb] = barbell_connectors(10, 10);
  const auto d = shortest_path_lengths(g, ca);
  EXPECT_EQ(d[ca], 0u);
  EXPECT_EQ(d[cb], 11u);

  const std::vector<Edge> two{{0, 1}, {2, 3}};
  const Graph split = Graph::from_edges(4, two);
  EXPECT_EQ(shortest_path_lengths(split, 0)[3], kUnreachable);
  const DistanceMatrix dm(split);
  EXPECT_EQ(dm(1, 0), 1u);
  EXPECT_EQ(dm(1, 2), kUnreachable);
}

TEST(Subgraph, InducedKeepsLabelsAndEdges) {
  const Graph g = karate_club();
  const auto nodes = sample_nodes(g.node_count(), 20, 5);
  ASSERT_EQ(nodes.size(), 20u);
  const Graph sub = induced_subgraph(g, nodes);
  EXPECT_EQ(sub.node_count(), 20u);
  for (NodeId i = 0; i < 20; ++i) {
    EXPECT_EQ(sub.label(i), g.label(nodes[i]));
    for (NodeId j = 0; j < 20; ++j)
      if (i != j) {
        EXPECT_EQ(sub.adjacent(i, j), g.adjacent(nodes[i], nodes[j]));
      }
  }
  EXPECT_EQ(sample_nodes(100, 10, 1), sample_nodes(100, 10, 1));
}
