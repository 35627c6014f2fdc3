#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "flatstruct/graph.hpp"
#include "flatstruct/parallel.hpp"
#include "flatstruct/simgraph.hpp"

namespace flatstruct {

/// Walker/Vose alias table over a fixed discrete distribution.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t sample(SplitMix64& rng) const {
    const std::size_t i = rng.below(prob_.size());
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Fixed-length walks stored back to back. Walks are grouped in rounds: each
/// round holds one walk per node, starting nodes in a shuffled order.
class WalkCorpus {
 public:
  WalkCorpus() = default;
  WalkCorpus(std::size_t walk_len, std::size_t walks_per_node, std::vector<NodeId> data);

  std::size_t walk_len() const { return walk_len_; }
  std::size_t walks_per_node() const { return walks_per_node_; }
  std::size_t walk_count() const { return walk_len_ ? data_.size() / walk_len_ : 0; }
  std::span<const NodeId> walk(std::size_t i) const {
    return {data_.data() + i * walk_len_, walk_len_};
  }
  const std::vector<NodeId>& tokens() const { return data_; }

 private:
  std::size_t walk_len_ = 0;
  std::size_t walks_per_node_ = 0;
  std::vector<NodeId> data_;
};

/// Walks on the similarity graph; each step follows the transition row of the
/// current node. Throws if some node has no similarity edges.
WalkCorpus biased_walks(const SimilarityGraph& sg, int walks_per_node, int walk_len,
                        std::uint64_t seed);

/// Uniform walks on the original graph (proximity baseline).
WalkCorpus uniform_walks(const Graph& g, int walks_per_node, int walk_len, std::uint64_t seed);

/// One walk per line, space-separated labels.
void write_corpus(const Graph& g, const WalkCorpus& corpus, std::ostream& out);

}  // namespace flatstruct
