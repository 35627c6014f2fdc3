#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flatstruct/walks.hpp"

namespace flatstruct {

enum class Objective { hierarchical_softmax, negative_sampling };

Objective parse_objective(std::string_view s);
std::string_view to_string(Objective o);

struct SkipGramOptions {
  int dim = 128;
  int window = 10;
  int epochs = 5;
  Objective objective = Objective::hierarchical_softmax;
  int negatives = 5;
  double lr = 0.025;
  std::uint64_t seed = 1;
  // > 1 enables unsynchronized (Hogwild) updates; results then depend on
  // thread timing.
  int threads = 1;
};

/// One vector per node, row-major.
struct EmbeddingMatrix {
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<double> epoch_loss;  // mean per-pair loss after each epoch, on a fixed walk sample

  std::size_t node_count() const { return dim ? values.size() / dim : 0; }
  std::span<const double> row(NodeId v) const {
    return {values.data() + static_cast<std::size_t>(v) * dim, dim};
  }
};

/// Huffman coding of nodes by corpus frequency. Inner nodes are numbered
/// 0..n-2; path[v] lists the inner nodes from the root down to leaf v and
/// code[v] the branch taken at each of them.
struct HuffmanTree {
  std::vector<std::vector<std::uint32_t>> path;
  std::vector<std::vector<std::uint8_t>> code;
};
HuffmanTree build_huffman(std::span<const std::uint64_t> counts);

/// Binary-logistic target: output row and label (1 = observed, 0 = noise).
/// Both objectives reduce a (center, context) pair to a list of these.
struct Target {
  std::uint32_t row;
  double label;
};

/// -sum_t [label log s(h.o_t) + (1 - label) log s(-h.o_t)].
double pair_loss(std::span<const double> h, std::span<const double> out, std::size_t dim,
                 std::span<const Target> targets);
/// Gradients of pair_loss w.r.t. h and w.r.t. each target's output row
/// (grad_out is targets.size() x dim).
void pair_gradient(std::span<const double> h, std::span<const double> out, std::size_t dim,
                   std::span<const Target> targets, std::span<double> grad_h,
                   std::span<double> grad_out);

/// Number of (center, context) pairs at `center` in a sequence of `len`.
std::size_t context_pairs(std::size_t len, std::size_t center, int window);

/// Trains centre (input) vectors so each walk position predicts the nodes
/// within `window` steps. The learning rate decays linearly to lr/100.
EmbeddingMatrix skipgram_train(const WalkCorpus& corpus, std::size_t node_count,
                               const SkipGramOptions& opts);

struct LoadedEmbedding {
  std::vector<std::string> labels;
  EmbeddingMatrix matrix;
};

/// word2vec text format: "count dim", then "label v1 .. vd" with %.9g.
void save_embeddings(const Graph& g, const EmbeddingMatrix& emb, const std::string& path);
void write_embeddings(const Graph& g, const EmbeddingMatrix& emb, std::ostream& out);
LoadedEmbedding load_embeddings(const std::string& path);
LoadedEmbedding read_embeddings(std::istream& in);

}  // namespace flatstruct
