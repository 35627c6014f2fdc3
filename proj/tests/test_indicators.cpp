#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "flatstruct/generators.hpp"
#include "flatstruct/indicators.hpp"
#include "flatstruct/parallel.hpp"

using namespace flatstruct;

namespace {

Graph from_text(const std::string& text) {
  std::istringstream in(text);
  return read_edge_list(in).graph;
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

Graph star(int leaves) {
  std::vector<Edge> edges;
  for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, edges);
}

// Enumerates every shortest path explicitly by DFS along BFS layers.
std::vector<double> betweenness_oracle(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  for (NodeId s = 0; s < n; ++s) {
    const auto ds = shortest_path_lengths(g, s);
    for (NodeId t = s + 1; t < n; ++t) {
      if (ds[t] == kUnreachable) continue;
      std::vector<std::vector<NodeId>> paths;
      std::vector<NodeId> cur{s};
      std::function<void(NodeId)> dfs = [&](NodeId u) {
        if (u == t) {
          paths.push_back(cur);
          return;
        }
        for (NodeId w : g.neighbors(u)) {
          if (ds[w] == ds[u] + 1 && ds[w] <= ds[t]) {
            cur.push_back(w);
            dfs(w);
            cur.pop_back();
          }
        }
      };
      dfs(s);
      for (const auto& p : paths)
        for (std::size_t i = 1; i + 1 < p.size(); ++i) bc[p[i]] += 1.0 / paths.size();
    }
  }
  return bc;
}

// Repeatedly strips nodes of degree < k.
std::vector<int> core_oracle(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<int> core(n, 0);
  for (int k = 1;; ++k) {
    std::vector<bool> alive(n, true);
    bool changed = true;
    while (changed) {
      changed = false;
      for (NodeId v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        int d = 0;
        for (NodeId u : g.neighbors(v)) d += alive[u];
        if (d < k) {
          alive[v] = false;
          changed = true;
        }
      }
    }
    bool any = false;
    for (NodeId v = 0; v < n; ++v)
      if (alive[v]) {
        core[v] = k;
        any = true;
      }
    if (!any) return core;
  }
}

// Orbit templates as labelled adjacency matrices; a subset is matched by
// trying every permutation of its nodes.
struct Template {
  int size;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> orbit;  // orbit of template position i
};

const std::vector<Template>& templates() {
  static const std::vector<Template> t{
      {3, {{0, 1}, {1, 2}}, {1, 2, 1}},
      {3, {{0, 1}, {1, 2}, {0, 2}}, {3, 3, 3}},
      {4, {{0, 1}, {1, 2}, {2, 3}}, {4, 5, 5, 4}},
      {4, {{0, 1}, {0, 2}, {0, 3}}, {7, 6, 6, 6}},
      {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {8, 8, 8, 8}},
      {4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}}, {10, 10, 11, 9}},
      {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}, {13, 12, 13, 12}},
      {4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {14, 14, 14, 14}},
  };
  return t;
}

std::vector<std::uint64_t> gdv_oracle(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::uint64_t> c(n * kOrbitCount, 0);
  for (NodeId v = 0; v < n; ++v) c[v * kOrbitCount] = g.degree(v);
  auto visit = [&](std::vector<NodeId> s) {
    std::sort(s.begin(), s.end());
    do {
      for (const auto& t : templates()) {
        if (t.size != static_cast<int>(s.size())) continue;
        bool match = true;
        for (int i = 0; i < t.size && match; ++i)
          for (int j = i + 1; j < t.size && match; ++j) {
            const bool want = std::find(t.edges.begin(), t.edges.end(), std::pair{i, j}) !=
                                  t.edges.end() ||
                              std::find(t.edges.begin(), t.edges.end(), std::pair{j, i}) !=
                                  t.edges.end();
            match = want == g.adjacent(s[i], s[j]);
          }
        if (match) {
          for (int i = 0; i < t.size; ++i) ++c[s[i] * kOrbitCount + t.orbit[i]];
          return;
        }
      }
    } while (std::next_permutation(s.begin(), s.end()));
  };
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      for (NodeId d = b + 1; d < n; ++d) {
        visit({a, b, d});
        for (NodeId e = d + 1; e < n; ++e) visit({a, b, d, e});
      }
  return c;
}

std::vector<double> column(const IndicatorTable& t) { return t.values; }

}  // namespace

TEST(Degree, Examples) {
  const Graph k = generate_mirrored_karate();
  const auto d = degree(k);
  EXPECT_EQ(d.scalar(*k.find("12")), 1.0);
  EXPECT_EQ(d.scalar(*k.find("67")), 1.0);
  EXPECT_EQ(degree(generate_barbell(10, 10)).scalar(0), 9.0);
  const std::vector<Edge> one{{0, 1}};
  EXPECT_EQ(degree(Graph::from_edges(3, one)).scalar(2), 0.0);
}

TEST(Clustering, ExamplesAndOracle) {
  EXPECT_DOUBLE_EQ(clustering_coefficient(from_text("a b\nb c\nc a\n")).scalar(0), 1.0);
  EXPECT_EQ(clustering_coefficient(star(5)).scalar(0), 0.0);
  const Graph g = karate_club();
  const auto cc = clustering_coefficient(g);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto nb = g.neighbors(v);
    double links = 0;
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) links += g.adjacent(nb[i], nb[j]);
    const double d = static_cast<double>(nb.size());
    const double expected = nb.size() < 2 ? 0.0 : 2 * links / (d * (d - 1));
    EXPECT_NEAR(cc.scalar(v), expected, 1e-15);
  }
}

TEST(Closeness, Examples) {
  const Graph p = from_text("a b\nb c\n");
  const auto c = closeness_centrality(p);
  EXPECT_DOUBLE_EQ(c.scalar(*p.find("b")), 1.0);
  EXPECT_DOUBLE_EQ(c.scalar(*p.find("a")), 2.0 / 3.0);
  EXPECT_EQ(closeness_centrality(Graph::from_edges(1, {})).scalar(0), 0.0);
  // Per component: a pair of edges gives 1.0 everywhere.
  const std::vector<Edge> two{{0, 1}, {2, 3}};
  for (double x : closeness_centrality(Graph::from_edges(4, two)).values) EXPECT_EQ(x, 1.0);
}

TEST(Betweenness, Examples) {
  const Graph p = from_text("a b\nb c\n");
  EXPECT_DOUBLE_EQ(betweenness_centrality(p).scalar(*p.find("b")), 1.0);
  for (double x : betweenness_centrality(from_text("a b\nb c\nc a\n")).values) EXPECT_EQ(x, 0.0);
  EXPECT_DOUBLE_EQ(betweenness_centrality(star(4)).scalar(0), 6.0);
}

TEST(Betweenness, MatchesPathEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const Graph g = random_graph(n, 0.2 + 0.5 * (rng() % 100) / 100.0, rng());
    const auto expected = betweenness_oracle(g);
    const auto got = betweenness_centrality(g);
    const auto serial = betweenness_centrality_serial(g);
    for (NodeId v = 0; v < n; ++v) {
      EXPECT_NEAR(got.scalar(v), expected[v], 1e-12);
      EXPECT_NEAR(serial.scalar(v), expected[v], 1e-12);
    }
  }
}

TEST(Betweenness, ParallelMatchesSerialAndThreadCount) {
  const Graph g = erdos_renyi(700, 6.0, 5);
  const auto serial = betweenness_centrality_serial(g);
  set_thread_count(1);
  const auto one = betweenness_centrality(g);
  set_thread_count(4);
  const auto four = betweenness_centrality(g);
  set_thread_count(0);
  EXPECT_EQ(one.values, four.values);
  for (NodeId v = 0; v < g.node_count(); ++v)
    EXPECT_NEAR(one.scalar(v), serial.scalar(v), 1e-9 * std::max(1.0, serial.scalar(v)));
}

TEST(Eigenvector, Examples) {
  const auto pair = eigenvector_centrality(from_text("a b\n"));
  EXPECT_EQ(pair.table.scalar(0), pair.table.scalar(1));
  // Cycle: 2-regular.
  std::vector<Edge> ring;
  for (NodeId i = 0; i < 12; ++i) ring.emplace_back(i, (i + 1) % 12);
  const auto cyc = eigenvector_centrality(Graph::from_edges(12, ring));
  for (double x : cyc.table.values) EXPECT_NEAR(x, cyc.table.scalar(0), 1e-8);
  EXPECT_THROW(eigenvector_centrality(karate_club(), 0), std::invalid_argument);
}

TEST(Eigenvector, KarateMatchesDenseEigensolver) {
  const Graph g = karate_club();
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : g.edges()) a(u, v) = a(v, u) = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd lead = es.eigenvectors().col(n - 1).cwiseAbs();
  lead.normalize();

  const auto r = eigenvector_centrality(g, 1000, 1e-12);
  EXPECT_TRUE(r.converged);
  for (Eigen::Index v = 0; v < n; ++v) EXPECT_NEAR(r.table.scalar(v), lead(v), 1e-8);

  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](NodeId x, NodeId y) { return r.table.scalar(x) > r.table.scalar(y); });
  EXPECT_NE(std::find(order.begin(), order.begin() + 3, *g.find("34")), order.begin() + 3);
  for (double x : r.table.values) EXPECT_GE(x, 0.0);
}

TEST(CoreNumber, ExamplesAndOracle) {
  const auto barbell = core_number(generate_barbell(10, 10));
  EXPECT_EQ(barbell.scalar(0), 9.0);
  EXPECT_EQ(barbell.scalar(14), 2.0);
  EXPECT_EQ(core_number(star(3)).scalar(1), 1.0);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(5 + rng() % 60, 0.15, rng());
    const auto expected = core_oracle(g);
    const auto got = core_number(g);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      EXPECT_EQ(got.scalar(v), expected[v]);
      EXPECT_LE(got.scalar(v), static_cast<double>(g.degree(v)));
    }
  }
}

TEST(Gdv, Examples) {
  const auto tri = gdv(from_text("a b\nb c\nc a\n"));
  EXPECT_TRUE(tri.vector);
  ASSERT_EQ(tri.width, kOrbitCount);
  for (std::size_t o = 0; o < kOrbitCount; ++o)
    EXPECT_EQ(tri.row(0)[o], o == 0 ? 2.0 : (o == 3 ? 1.0 : 0.0));
  const Graph p = from_text("a b\nb c\n");
  const auto path = gdv(p);
  const auto a = path.row(*p.find("a"));
  for (std::size_t o = 0; o < kOrbitCount; ++o) EXPECT_EQ(a[o], o <= 1 ? 1.0 : 0.0);
}

TEST(Gdv, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::vector<Graph> graphs{karate_club(), generate_barbell(4, 2)};
  for (int trial = 0; trial < 15; ++trial)
    graphs.push_back(random_graph(4 + rng() % 18, 0.1 + 0.6 * (rng() % 100) / 100.0, rng()));
  for (const Graph& g : graphs) {
    const auto expected = gdv_oracle(g);
    const auto got = gdv(g);
    const auto deg = degree(g);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      EXPECT_EQ(got.row(v)[0], deg.scalar(v));
      for (std::size_t o = 0; o < kOrbitCount; ++o)
        EXPECT_EQ(got.row(v)[o], static_cast<double>(expected[v * kOrbitCount + o]))
            << "node " << v << " orbit " << o;
    }
  }
}

TEST(AnonymousWalk, Encoding) {
  const std::vector<NodeId> abac{0, 1, 0, 2};
  EXPECT_EQ(anonymize_walk(abac), (std::vector<int>{1, 2, 1, 4}));
  EXPECT_EQ(anonymize_walk(abac, AnonymousRule::first_rank), (std::vector<int>{1, 2, 1, 3}));
  const std::vector<NodeId> abc{0, 1, 2};
  EXPECT_EQ(anonymize_walk(abc), (std::vector<int>{1, 2, 3}));
  const std::vector<NodeId> aba{0, 1, 0};
  const auto seq = anonymize_walk(aba);
  EXPECT_EQ(std::count(seq.begin(), seq.end(), seq.front()), 2);
}

TEST(AnonymousWalk, StatsBounds) {
  const Graph g = karate_club();
  const int len = 8;
  const auto t = anonymous_walk_stats(g, len, 20, 99);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    EXPECT_GE(t.distinct.scalar(v), 1.0);
    EXPECT_LE(t.distinct.scalar(v), len);
    EXPECT_GE(t.start_count.scalar(v), 1.0);
    EXPECT_LE(t.start_count.scalar(v), len);
  }
  // A path a-b has only two nodes: every walk alternates.
  const auto ab = anonymous_walk_stats(from_text("a b\n"), 5, 3, 1);
  EXPECT_EQ(ab.distinct.scalar(0), 2.0);
  EXPECT_EQ(ab.start_count.scalar(0), 3.0);
  EXPECT_THROW(anonymous_walk_stats(g, 1, 1, 0), std::invalid_argument);

  // Every anonymous sequence starts with 1 and stays in 1..len.
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    std::vector<NodeId> walk(len);
    for (auto& x : walk) x = rng() % 4;
    const auto s = anonymize_walk(walk);
    EXPECT_EQ(s.front(), 1);
    for (int x : s) {
      EXPECT_GE(x, 1);
      EXPECT_LE(x, len);
    }
  }
}

TEST(RandomWalkOccurrence, Shares) {
  const auto ab = random_walk_occurrences(from_text("a b\n"), 10, 200, 1);
  EXPECT_NEAR(ab.scalar(0), 0.5, 1e-12);  // exact: walks strictly alternate
  const auto st = random_walk_occurrences(star(6), 20, 200, 2);
  for (NodeId leaf = 1; leaf <= 6; ++leaf) EXPECT_GT(st.scalar(0), st.scalar(leaf));
  double total = 0;
  for (double x : st.values) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Determinism, WalkIndicatorsIgnoreThreadCount) {
  const Graph g = erdos_renyi(400, 5.0, 8);
  set_thread_count(1);
  const auto a1 = anonymous_walk_stats(g, 10, 10, 5);
  const auto r1 = random_walk_occurrences(g, 10, 10, 5);
  const auto g1 = gdv(g);
  set_thread_count(3);
  const auto a3 = anonymous_walk_stats(g, 10, 10, 5);
  const auto r3 = random_walk_occurrences(g, 10, 10, 5);
  const auto g3 = gdv(g);
  set_thread_count(0);
  EXPECT_EQ(a1.distinct.values, a3.distinct.values);
  EXPECT_EQ(a1.start_count.values, a3.start_count.values);
  EXPECT_EQ(r1.values, r3.values);
  EXPECT_EQ(g1.values, g3.values);
}

TEST(Equivariance, RelabelingPermutesTables) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5 + rng() % 46;
    const Graph g = random_graph(n, 0.12, rng());
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> edges;
    for (auto [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
    const Graph h = Graph::from_edges(n, edges);
    for (IndicatorKind kind :
         {IndicatorKind::degree, IndicatorKind::clustering, IndicatorKind::closeness,
          IndicatorKind::betweenness, IndicatorKind::eigenvector, IndicatorKind::core_number,
          IndicatorKind::gdv}) {
      const auto a = compute_indicator(g, kind);
      const auto b = compute_indicator(h, kind);
      for (NodeId v = 0; v < n; ++v)
        for (std::size_t c = 0; c < a.width; ++c)
          EXPECT_NEAR(a.row(v)[c], b.row(perm[v])[c], 1e-9) << indicator_name(kind);
    }
  }
}

TEST(Tables, StandardizeAndTsv) {
  auto t = degree(star(3));
  standardize(t);
  double mean = 0, var = 0;
  for (double x : t.values) mean += x;
  for (double x : t.values) var += x * x;
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var / 4, 1.0, 1e-12);
  auto flat = degree(from_text("a b\n"));
  standardize(flat);
  EXPECT_EQ(column(flat), (std::vector<double>{0.0, 0.0}));

  const Graph p = from_text("a b\nb c\n");
  const std::vector<IndicatorTable> tables{degree(p), closeness_centrality(p)};
  std::ostringstream out;
  write_indicator_tsv(p, tables, out);
  EXPECT_EQ(out.str(), "label\tdegree\tcloseness\na\t1\t0.6666666667\nb\t2\t1\nc\t1\t0.6666666667\n");
  EXPECT_EQ(parse_indicator_kind("gdv"), IndicatorKind::gdv);
  EXPECT_THROW(parse_indicator_kind("pagerank"), std::invalid_argument);
}
