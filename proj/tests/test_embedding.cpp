#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "flatstruct/generators.hpp"
#include "flatstruct/skipgram.hpp"

using namespace flatstruct;

namespace {

SimilarityGraph triangle() {
  return SimilarityGraph(3, {{{0, 1}, 1.0}, {{0, 2}, 3.0}, {{1, 2}, 6.0}}, BuildMode::dense,
                         WeightTransform{});
}

bool walks_valid(const WalkCorpus& c, const std::function<bool(NodeId, NodeId)>& edge) {
  for (std::size_t i = 0; i < c.walk_count(); ++i) {
    const auto w = c.walk(i);
    for (std::size_t t = 1; t < w.size(); ++t)
      if (!edge(w[t - 1], w[t])) return false;
  }
  return true;
}

double l2(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST(Alias, MatchesDistribution) {
  const std::vector<double> w{1, 0, 2, 7};
  const AliasTable t(w);
  SplitMix64 rng(3);
  std::vector<int> hits(4, 0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++hits[t.sample(rng)];
  EXPECT_EQ(hits[1], 0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(hits[i] / double(draws), w[i] / 10.0, 0.005);
  EXPECT_THROW(AliasTable(std::vector<double>{0, 0}), std::invalid_argument);
}

TEST(Walks, TwoNodesAlternate) {
  const SimilarityGraph sg(2, {{{0, 1}, 0.3}}, BuildMode::dense, WeightTransform{});
  const auto c = biased_walks(sg, 3, 7, 1);
  EXPECT_EQ(c.walk_count(), 6u);
  for (std::size_t i = 0; i < c.walk_count(); ++i) {
    const auto w = c.walk(i);
    for (std::size_t t = 1; t < w.size(); ++t) EXPECT_NE(w[t], w[t - 1]);
  }
}

TEST(Walks, StepFrequenciesFollowTransitionRows) {
  const auto sg = triangle();
  const auto c = biased_walks(sg, 500, 101, 17);  // 3 * 500 * 100 = 1.5e5 steps
  std::vector<std::vector<double>> freq(3, std::vector<double>(3, 0));
  for (std::size_t i = 0; i < c.walk_count(); ++i) {
    const auto w = c.walk(i);
    for (std::size_t t = 1; t < w.size(); ++t) freq[w[t - 1]][w[t]] += 1;
  }
  for (NodeId x = 0; x < 3; ++x) {
    const auto row = sg.transition_row(x);
    double total = 0;
    for (double f : freq[x]) total += f;
    const auto nb = sg.neighbors(x);
    for (std::size_t j = 0; j < nb.size(); ++j) EXPECT_NEAR(freq[x][nb[j]] / total, row[j], 0.02);
  }
}

TEST(Walks, CorpusShapeAndDeterminism) {
  const Graph g = karate_club();
  const auto sd = StructuralDistance(g, {degree(g)}, {ComparisonSpec{}}, WeightConfig::uniform(1, 1));
  const auto sg = build_pruned(sd, WeightTransform{}, 1.0);
  const auto a = biased_walks(sg, 4, 12, 99);
  const auto b = biased_walks(sg, 4, 12, 99);
  EXPECT_EQ(a.tokens(), b.tokens());
  EXPECT_NE(a.tokens(), biased_walks(sg, 4, 12, 100).tokens());
  std::vector<int> starts(g.node_count(), 0);
  for (std::size_t i = 0; i < a.walk_count(); ++i) {
    EXPECT_EQ(a.walk(i).size(), 12u);
    ++starts[a.walk(i)[0]];
  }
  for (int s : starts) EXPECT_EQ(s, 4);
  EXPECT_TRUE(walks_valid(a, [&](NodeId x, NodeId y) { return sg.weight(x, y) > 0; }));
  EXPECT_THROW(biased_walks(sg, 0, 5, 1), std::invalid_argument);
  EXPECT_THROW(biased_walks(SimilarityGraph(2, {}, BuildMode::pruned, WeightTransform{}), 1, 5, 1),
               std::invalid_argument);
}

TEST(Walks, Uniform) {
  std::istringstream in("a b\nb c\n");
  const Graph p = read_edge_list(in).graph;
  const auto c = uniform_walks(p, 20000, 2, 5);
  double to_a = 0, from_b = 0;
  for (std::size_t i = 0; i < c.walk_count(); ++i) {
    const auto w = c.walk(i);
    if (w[0] == 1) {
      ++from_b;
      to_a += w[1] == 0;
    }
  }
  EXPECT_NEAR(to_a / from_b, 0.5, 0.02);
  const Graph k = karate_club();
  const auto kc = uniform_walks(k, 3, 20, 8);
  EXPECT_TRUE(walks_valid(kc, [&](NodeId x, NodeId y) { return k.adjacent(x, y); }));
  EXPECT_EQ(kc.tokens(), uniform_walks(k, 3, 20, 8).tokens());
  const std::vector<Edge> e{{0, 1}};
  EXPECT_THROW(uniform_walks(Graph::from_edges(3, e), 1, 4, 0), std::invalid_argument);
}

TEST(SkipGram, ContextArithmetic) {
  EXPECT_EQ(context_pairs(5, 2, 2), 4u);
  EXPECT_EQ(context_pairs(5, 0, 2), 2u);
  EXPECT_EQ(context_pairs(5, 4, 10), 4u);
}

TEST(SkipGram, HuffmanIsPrefixFreeAndComplete) {
  const std::vector<std::uint64_t> counts{50, 3, 3, 20, 1, 9, 9, 2};
  const auto t = build_huffman(counts);
  double kraft = 0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    ASSERT_EQ(t.path[v].size(), t.code[v].size());
    EXPECT_EQ(t.path[v].front(), counts.size() - 2);  // root
    kraft += std::ldexp(1.0, -static_cast<int>(t.code[v].size()));
    for (std::size_t u = 0; u < counts.size(); ++u) {
      if (u == v || t.code[u].size() < t.code[v].size()) continue;
      EXPECT_FALSE(std::equal(t.code[v].begin(), t.code[v].end(), t.code[u].begin())) << v << ' ' << u;
    }
  }
  EXPECT_DOUBLE_EQ(kraft, 1.0);
  EXPECT_LE(t.code[0].size(), t.code[4].size());
  // Weighted code length of an optimal code for these counts.
  std::size_t cost = 0;
  for (std::size_t v = 0; v < counts.size(); ++v) cost += counts[v] * t.code[v].size();
  EXPECT_EQ(cost, 207u);
}

TEST(SkipGram, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> normal(0.0, 0.7);
  const std::size_t dim = 6, rows = 9;
  for (Objective obj : {Objective::hierarchical_softmax, Objective::negative_sampling}) {
    for (int point = 0; point < 20; ++point) {
      std::vector<double> h(dim), out(rows * dim);
      for (auto& x : h) x = normal(rng);
      for (auto& x : out) x = normal(rng);
      std::vector<Target> targets;
      if (obj == Objective::hierarchical_softmax) {
        for (std::uint32_t r = 0; r < 4; ++r) targets.push_back({r, static_cast<double>(rng() % 2)});
      } else {
        targets.push_back({0, 1.0});
        for (std::uint32_t r = 1; r <= 5; ++r) targets.push_back({r, 0.0});
      }
      std::vector<double> gh(dim), go(targets.size() * dim);
      pair_gradient(h, out, dim, targets, gh, go);

      std::vector<double> analytic(gh), numeric;
      for (double g : go) analytic.push_back(g);
      const double eps = 1e-5;
      auto central = [&](double& param) {
        const double keep = param;
        param = keep + eps;
        const double up = pair_loss(h, out, dim, targets);
        param = keep - eps;
        const double down = pair_loss(h, out, dim, targets);
        param = keep;
        return (up - down) / (2 * eps);
      };
      for (auto& x : h) numeric.push_back(central(x));
      for (const auto& t : targets)
        for (std::size_t i = 0; i < dim; ++i) numeric.push_back(central(out[t.row * dim + i]));

      double diff = 0, norm = 0;
      for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
        norm = std::max(norm, std::max(std::abs(analytic[i]), std::abs(numeric[i])));
      }
      EXPECT_LT(std::sqrt(diff) / std::max(norm, 1e-12), 1e-4) << to_string(obj);
    }
  }
}

TEST(SkipGram, LossDecreasesAndRunsAreRepeatable) {
  const Graph g = karate_club();
  const StructuralDistance sd(g, {degree(g), clustering_coefficient(g)},
                              {ComparisonSpec{}, ComparisonSpec{}}, WeightConfig::uniform(2, 2));
  const auto sg = build_dense(sd, WeightTransform{});
  const auto corpus = biased_walks(sg, 10, 40, 4);
  for (Objective obj : {Objective::hierarchical_softmax, Objective::negative_sampling}) {
    SkipGramOptions o;
    o.dim = 16;
    o.window = 5;
    o.epochs = 5;
    o.objective = obj;
    o.seed = 77;
    const auto a = skipgram_train(corpus, g.node_count(), o);
    ASSERT_EQ(a.epoch_loss.size(), 5u);
    int rises = 0;
    for (std::size_t e = 1; e < 5; ++e) rises += a.epoch_loss[e] > a.epoch_loss[e - 1];
    EXPECT_LE(rises, 1) << to_string(obj);
    const auto b = skipgram_train(corpus, g.node_count(), o);
    EXPECT_EQ(a.values, b.values);
    for (double x : a.values) EXPECT_TRUE(std::isfinite(x));
  }
  EXPECT_THROW(skipgram_train(WalkCorpus{}, 3, SkipGramOptions{}), std::invalid_argument);
}

TEST(SkipGram, MirroredPairsSitCloserThanRandomPairs) {
  const Graph g = generate_mirrored_karate();
  ComparisonSpec dtw;
  dtw.mode = CompareMode::sorted_dtw;
  dtw.element = ElementDistance::ratio;
  const StructuralDistance sd(g, {degree(g), clustering_coefficient(g)}, {dtw, ComparisonSpec{}},
                              WeightConfig::uniform(2, 2));
  const auto sg = build_dense(sd, WeightTransform{});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto corpus = biased_walks(sg, 10, 40, seed);
    SkipGramOptions o;
    o.dim = 16;
    o.window = 5;
    o.epochs = 3;
    o.seed = seed;
    const auto emb = skipgram_train(corpus, g.node_count(), o);
    double twin = 0, other = 0;
    int nt = 0, no = 0;
    SplitMix64 rng(seed);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (v == kKarateBridgeA || v == kKarateBridgeB) continue;
      twin += l2(emb.row(v), emb.row(karate_mirror(v)));
      ++nt;
      const auto u = static_cast<NodeId>(rng.below(g.node_count()));
      if (u != v && u != karate_mirror(v)) {
        other += l2(emb.row(v), emb.row(u));
        ++no;
      }
    }
    EXPECT_LT(twin / nt, other / no) << "seed " << seed;
  }
}

TEST(EmbeddingIo, RoundTripAndErrors) {
  const Graph g = karate_club();
  EmbeddingMatrix emb;
  emb.dim = 16;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < 34 * 16; ++i) emb.values.push_back(normal(rng));
  const auto path = (std::filesystem::temp_directory_path() / "fs_emb_test.txt").string();
  save_embeddings(g, emb, path);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "34 16");
  }
  const auto back = load_embeddings(path);
  ASSERT_EQ(back.labels, g.labels());
  for (std::size_t i = 0; i < emb.values.size(); ++i)
    EXPECT_NEAR(back.matrix.values[i], emb.values[i], 1e-8 * std::max(1.0, std::abs(emb.values[i])));

  std::istringstream truncated("3 2\na 1 2\nb 3\n");
  try {
    read_embeddings(truncated);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream short_file("3 2\na 1 2\n");
  try {
    read_embeddings(short_file);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream bad_header("three 2\n");
  EXPECT_THROW(read_embeddings(bad_header), ParseError);
}
