#include "flatstruct/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flatstruct {

Objective parse_objective(std::string_view s) {
  if (s == "hierarchical_softmax" || s == "hs") return Objective::hierarchical_softmax;
  if (s == "negative_sampling" || s == "ns") return Objective::negative_sampling;
  throw std::invalid_argument("unknown objective '" + std::string(s) + "'");
}

std::string_view to_string(Objective o) {
  return o == Objective::hierarchical_softmax ? "hierarchical_softmax" : "negative_sampling";
}

HuffmanTree build_huffman(std::span<const std::uint64_t> counts) {
  const std::size_t n = counts.size();
  HuffmanTree tree;
  tree.path.resize(n);
  tree.code.resize(n);
  if (n < 2) return tree;

  // Leaves sorted by count, descending; ties by id.
  std::vector<std::uint32_t> leaf(n);
  std::iota(leaf.begin(), leaf.end(), 0u);
  std::stable_sort(leaf.begin(), leaf.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });

  std::vector<std::uint64_t> count(2 * n - 1, ~std::uint64_t{0});
  std::vector<std::size_t> parent(2 * n - 1, 0);
  std::vector<std::uint8_t> binary(2 * n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) count[i] = counts[leaf[i]];

  // Two-queue merge: leaves consumed from the back, inner nodes from the front.
  std::int64_t pos1 = static_cast<std::int64_t>(n) - 1;
  std::size_t pos2 = n;
  auto take_min = [&]() {
    if (pos1 >= 0 && count[pos1] < count[pos2]) return static_cast<std::size_t>(pos1--);
    return pos2++;
  };
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const std::size_t m1 = take_min();
    const std::size_t m2 = take_min();
    count[n + a] = count[m1] + count[m2];
    parent[m1] = n + a;
    parent[m2] = n + a;
    binary[m2] = 1;
  }
  const std::size_t root = 2 * n - 2;
  for (std::size_t i = 0; i < n; ++i) {
    auto& path = tree.path[leaf[i]];
    auto& code = tree.code[leaf[i]];
    for (std::size_t b = i; b != root; b = parent[b]) {
      code.push_back(binary[b]);
      path.push_back(static_cast<std::uint32_t>(parent[b] - n));
    }
    std::reverse(path.begin(), path.end());
    std::reverse(code.begin(), code.end());
  }
  return tree;
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Four partial sums break the add dependency chain; the order is fixed, so
// results stay deterministic.
double dot(const double* a, const double* b, std::size_t d) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= d; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < d; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Loss of one logistic target at score x: -[l log s(x) + (1-l) log s(-x)].
double target_loss(double x, double label) {
  return label * softplus(-x) + (1.0 - label) * softplus(x);
}

}  // namespace

double pair_loss(std::span<const double> h, std::span<const double> out, std::size_t dim,
                 std::span<const Target> targets) {
  double loss = 0.0;
  for (const auto& t : targets) loss += target_loss(dot(h.data(), &out[t.row * dim], dim), t.label);
  return loss;
}

void pair_gradient(std::span<const double> h, std::span<const double> out, std::size_t dim,
                   std::span<const Target> targets, std::span<double> grad_h,
                   std::span<double> grad_out) {
  std::fill(grad_h.begin(), grad_h.end(), 0.0);
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const double* o = &out[targets[j].row * dim];
    const double g = sigmoid(dot(h.data(), o, dim)) - targets[j].label;
    for (std::size_t i = 0; i < dim; ++i) {
      grad_h[i] += g * o[i];
      grad_out[j * dim + i] = g * h[i];
    }
  }
}

std::size_t context_pairs(std::size_t len, std::size_t center, int window) {
  const auto w = static_cast<std::size_t>(window);
  const std::size_t lo = center >= w ? center - w : 0;
  const std::size_t hi = std::min(len - 1, center + w);
  return hi - lo;
}

EmbeddingMatrix skipgram_train(const WalkCorpus& corpus, std::size_t n,
                               const SkipGramOptions& opts) {
  if (opts.dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (opts.window < 1) throw std::invalid_argument("window must be >= 1");
  if (opts.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(opts.lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (opts.objective == Objective::negative_sampling && opts.negatives < 1) {
    throw std::invalid_argument("negative sampling needs >= 1 negatives");
  }
  if (corpus.walk_count() == 0) throw std::invalid_argument("empty walk corpus");

  const auto d = static_cast<std::size_t>(opts.dim);
  std::vector<std::uint64_t> counts(n, 0);
  for (NodeId v : corpus.tokens()) {
    if (v >= n) throw std::invalid_argument("walk corpus names a node outside the graph");
    ++counts[v];
  }

  EmbeddingMatrix emb;
  emb.dim = d;
  emb.values.resize(n * d);
  {
    SplitMix64 rng(derive_seed(opts.seed, 0x1217ULL));
    for (double& x : emb.values) x = (rng.uniform() - 0.5) / static_cast<double>(d);
  }

  HuffmanTree tree;
  AliasTable noise;
  std::vector<double> out;
  if (opts.objective == Objective::hierarchical_softmax) {
    tree = build_huffman(counts);
    out.assign((n > 1 ? n - 1 : 1) * d, 0.0);
  } else {
    std::vector<double> w(n);
    for (std::size_t v = 0; v < n; ++v) w[v] = std::pow(static_cast<double>(counts[v]), 0.75);
    noise = AliasTable(w);
    out.assign(n * d, 0.0);
  }

  const std::size_t walks = corpus.walk_count();
  const std::size_t len = corpus.walk_len();
  const double total_walks = static_cast<double>(walks) * opts.epochs;
  double* in = emb.values.data();

  auto fill_targets = [&](NodeId ctx, SplitMix64& rng, std::vector<Target>& targets) {
    targets.clear();
    if (opts.objective == Objective::hierarchical_softmax) {
      const auto& path = tree.path[ctx];
      const auto& code = tree.code[ctx];
      for (std::size_t t = 0; t < path.size(); ++t) targets.push_back({path[t], 1.0 - code[t]});
    } else {
      targets.push_back({ctx, 1.0});
      for (int k = 0; k < opts.negatives; ++k) {
        const auto neg = static_cast<std::uint32_t>(noise.sample(rng));
        if (neg != ctx) targets.push_back({neg, 0.0});
      }
    }
  };

  // Online loss (scored just before each update) rises as the rate decays and
  // the model stops tracking walk-local correlations, so the reported epoch
  // loss is a frozen-parameter pass over a fixed walk sample with fixed noise.
  const std::size_t eval_walks = std::min<std::size_t>(walks, 256);
  auto evaluate = [&]() {
    double loss_sum = 0.0;
    std::uint64_t pair_count = 0;
    std::vector<Target> targets;
    for (std::size_t wi = 0; wi < eval_walks; ++wi) {
      SplitMix64 rng(derive_seed(opts.seed, 0xe7a1ULL, wi));
      const auto walk = corpus.walk(wi);
      for (std::size_t c = 0; c < len; ++c) {
        const std::span<const double> h(in + static_cast<std::size_t>(walk[c]) * d, d);
        const std::size_t lo = c >= static_cast<std::size_t>(opts.window) ? c - opts.window : 0;
        const std::size_t hi = std::min(len - 1, c + opts.window);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == c) continue;
          fill_targets(walk[j], rng, targets);
          loss_sum += pair_loss(h, out, d, targets);
          ++pair_count;
        }
      }
    }
    return loss_sum / static_cast<double>(std::max<std::uint64_t>(pair_count, 1));
  };

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
#pragma omp parallel num_threads(std::max(1, opts.threads)) if (opts.threads > 1)
    {
      std::vector<double> grad_h(d);
      std::vector<Target> targets;
#pragma omp for schedule(static)
      for (std::int64_t wi = 0; wi < static_cast<std::int64_t>(walks); ++wi) {
        const double progress = (static_cast<double>(epoch) * walks + wi) / total_walks;
        const double lr = opts.lr * (1.0 - 0.99 * progress);
        SplitMix64 rng(derive_seed(opts.seed, static_cast<std::uint64_t>(epoch) + 1,
                                   static_cast<std::uint64_t>(wi)));
        const auto walk = corpus.walk(static_cast<std::size_t>(wi));
        for (std::size_t c = 0; c < len; ++c) {
          double* h = in + static_cast<std::size_t>(walk[c]) * d;
          const std::size_t lo = c >= static_cast<std::size_t>(opts.window) ? c - opts.window : 0;
          const std::size_t hi = std::min(len - 1, c + opts.window);
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == c) continue;
            fill_targets(walk[j], rng, targets);
            // Same step as pair_gradient: each output row moves against its
            // gradient at the current h, then h moves by the summed gradient.
            std::fill(grad_h.begin(), grad_h.end(), 0.0);
            for (const auto& t : targets) {
              double* o = out.data() + static_cast<std::size_t>(t.row) * d;
              const double g = sigmoid(dot(h, o, d)) - t.label;
              for (std::size_t i = 0; i < d; ++i) {
                grad_h[i] += g * o[i];
                o[i] -= lr * g * h[i];
              }
            }
            for (std::size_t i = 0; i < d; ++i) h[i] -= lr * grad_h[i];
          }
        }
      }
    }
    emb.epoch_loss.push_back(evaluate());
  }
  for (double x : emb.values) {
    if (!std::isfinite(x)) throw std::runtime_error("training diverged (non-finite embedding)");
  }
  return emb;
}

}  // namespace flatstruct
