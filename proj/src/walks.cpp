#include "flatstruct/walks.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace flatstruct {

namespace {

// Vose's construction into caller-provided slots.
void build_alias(std::span<const double> weights, std::span<double> prob,
                 std::span<std::uint32_t> alias) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("alias table over an empty distribution");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("alias weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("alias weights sum to zero");
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob[s] = scaled[s];
    alias[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) {
    prob[i] = 1.0;
    alias[i] = i;
  }
  for (auto i : small) {
    prob[i] = 1.0;
    alias[i] = i;
  }
}

}  // namespace

AliasTable::AliasTable(std::span<const double> weights)
    : prob_(weights.size()), alias_(weights.size()) {
  build_alias(weights, prob_, alias_);
}

WalkCorpus::WalkCorpus(std::size_t walk_len, std::size_t walks_per_node, std::vector<NodeId> data)
    : walk_len_(walk_len), walks_per_node_(walks_per_node), data_(std::move(data)) {}

namespace {

template <typename Step>
WalkCorpus generate(std::size_t n, int walks_per_node, int walk_len, std::uint64_t seed,
                    Step&& step) {
  if (walks_per_node < 1) throw std::invalid_argument("walks per node must be >= 1");
  if (walk_len < 2) throw std::invalid_argument("walk length must be >= 2");
  const auto p = static_cast<std::size_t>(walks_per_node);
  const auto len = static_cast<std::size_t>(walk_len);
  std::vector<NodeId> data(n * p * len);
  std::vector<NodeId> starts(n);
  for (std::size_t round = 0; round < p; ++round) {
    std::iota(starts.begin(), starts.end(), NodeId{0});
    SplitMix64 shuffle_rng(derive_seed(seed, 0xfeedULL, round));
    for (std::size_t i = n; i > 1; --i) std::swap(starts[i - 1], starts[shuffle_rng.below(i)]);
    NodeId* base = data.data() + round * n * len;
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t si = 0; si < static_cast<std::int64_t>(n); ++si) {
      const NodeId start = starts[si];
      SplitMix64 rng(derive_seed(seed, start, round + 1));
      NodeId* walk = base + si * len;
      walk[0] = start;
      for (std::size_t t = 1; t < len; ++t) walk[t] = step(walk[t - 1], rng);
    }
  }
  return WalkCorpus(len, p, std::move(data));
}

}  // namespace

WalkCorpus biased_walks(const SimilarityGraph& sg, int walks_per_node, int walk_len,
                        std::uint64_t seed) {
  const std::size_t n = sg.node_count();
  for (NodeId x = 0; x < n; ++x) {
    if (sg.degree(x) == 0) {
      throw std::invalid_argument("node " + std::to_string(x) + " has no similarity edges");
    }
  }
  // All alias tables in one array laid out like the similarity graph's rows,
  // each slot carrying both candidate nodes, so a step reads one entry.
  struct Slot {
    double prob;
    NodeId node, alias;
  };
  std::vector<std::size_t> offset(n + 1, 0);
  for (NodeId x = 0; x < n; ++x) offset[x + 1] = offset[x] + sg.degree(x);
  std::vector<Slot> slots(offset[n]);
#pragma omp parallel
  {
    std::vector<double> prob;
    std::vector<std::uint32_t> alias;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(n); ++xi) {
      const auto x = static_cast<NodeId>(xi);
      const auto nb = sg.neighbors(x);
      prob.resize(nb.size());
      alias.resize(nb.size());
      build_alias(sg.weights(x), prob, alias);
      for (std::size_t j = 0; j < nb.size(); ++j) slots[offset[x] + j] = {prob[j], nb[j], nb[alias[j]]};
    }
  }
  return generate(n, walks_per_node, walk_len, seed, [&](NodeId cur, SplitMix64& rng) {
    // Same draws as AliasTable::sample.
    const Slot& s = slots[offset[cur] + rng.below(offset[cur + 1] - offset[cur])];
    return rng.uniform() < s.prob ? s.node : s.alias;
  });
}

WalkCorpus uniform_walks(const Graph& g, int walks_per_node, int walk_len, std::uint64_t seed) {
  for (NodeId x = 0; x < g.node_count(); ++x) {
    if (g.degree(x) == 0) throw std::invalid_argument("node '" + g.label(x) + "' has no edges");
  }
  return generate(g.node_count(), walks_per_node, walk_len, seed,
                  [&](NodeId cur, SplitMix64& rng) {
                    const auto nb = g.neighbors(cur);
                    return nb[rng.below(nb.size())];
                  });
}

void write_corpus(const Graph& g, const WalkCorpus& corpus, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.walk_count(); ++i) {
    const auto w = corpus.walk(i);
    for (std::size_t t = 0; t < w.size(); ++t) out << (t ? " " : "") << g.label(w[t]);
    out << '\n';
  }
}

}  // namespace flatstruct
