#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "flatstruct/similarity.hpp"

namespace flatstruct {

enum class TransformKind { linear, exponential };
enum class BuildMode { dense, pruned };

inline constexpr double kLinearEpsilon = 1e-6;

/// 1 / (dist + 1e-6).
double weight_transform_linear(double dist);
/// wt^(-dist), clamped to the smallest normal double so it stays positive.
/// Throws for wt <= 1.
double weight_transform_exponential(double dist, double wt);

struct WeightTransform {
  TransformKind kind = TransformKind::exponential;
  double base = 2.718281828459045;  // wt, exponential only

  double operator()(double dist) const;
  void validate() const;
};

/// Weighted graph over the original node set; edge weights grow as the
/// structural distance shrinks.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  /// `edges` holds each unordered pair once as (x, y, w) with x < y.
  SimilarityGraph(std::size_t node_count, const std::vector<std::pair<Edge, double>>& edges,
                  BuildMode mode, WeightTransform transform);

  std::size_t node_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size() / 2; }
  BuildMode mode() const { return mode_; }
  const WeightTransform& transform() const { return transform_; }

  std::span<const NodeId> neighbors(NodeId x) const {
    return {targets_.data() + offsets_[x], targets_.data() + offsets_[x + 1]};
  }
  std::span<const double> weights(NodeId x) const {
    return {weights_.data() + offsets_[x], weights_.data() + offsets_[x + 1]};
  }
  std::size_t degree(NodeId x) const { return offsets_[x + 1] - offsets_[x]; }
  /// Weight of edge (x, y), or 0 if absent.
  double weight(NodeId x, NodeId y) const;

  /// P(x -> y) = w_xy / sum_j w_xj over x's neighbors. Throws if x is isolated.
  std::vector<double> transition_row(NodeId x) const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
  BuildMode mode_ = BuildMode::dense;
  WeightTransform transform_;
};

struct BuildStats {
  std::uint64_t evaluations = 0;  // distinct node pairs scored
  std::size_t lists = 0;          // sorted lists (pruned only)
  std::size_t window = 0;         // per-side window (pruned only)
};

inline constexpr std::size_t kDenseNodeCap = 5000;

/// Every unordered pair, scored in parallel over rows.
SimilarityGraph build_dense(const StructuralDistance& sd, const WeightTransform& transform,
                            std::size_t node_cap = kDenseNodeCap, BuildStats* stats = nullptr);
/// Single-threaded reference; bit-identical to build_dense.
SimilarityGraph build_dense_serial(const StructuralDistance& sd, const WeightTransform& transform,
                                   std::size_t node_cap = kDenseNodeCap);

/// ceil(c * log2(n)), at least 1.
std::size_t candidate_window(std::size_t n, double c);

/// Sorted-list candidate scheme: one list per (indicator, k) with a positive
/// weight, ordered by the layer key (ties by id). Each node is scored only
/// against the nodes within `candidate_window` positions in some list. Being
/// within the window is symmetric, so the result needs no extra symmetrizing.
SimilarityGraph build_pruned(const StructuralDistance& sd, const WeightTransform& transform,
                             double c = 2.0, BuildStats* stats = nullptr);

/// "label label weight" per edge, x < y.
void write_simgraph(const Graph& g, const SimilarityGraph& sg, std::ostream& out);

}  // namespace flatstruct
