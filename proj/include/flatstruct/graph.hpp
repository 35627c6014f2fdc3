#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flatstruct {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

// Malformed input files. The message names the offending line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EdgeCleanup {
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;
};

/// Undirected simple graph in CSR form with sorted adjacency lists.
///
/// Node ids are dense (0..node_count-1). Every node carries an external label;
/// generated graphs use decimal labels, loaded graphs keep the file's tokens.
class Graph {
 public:
  Graph() = default;

  /// Builds the graph from an edge list. Self-loops and repeated edges are
  /// dropped; the optional `cleanup` receives how many of each were seen.
  /// `labels` may be empty (ids are used) or hold exactly `node_count` names.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges,
                          std::vector<std::string> labels = {},
                          EdgeCleanup* cleanup = nullptr);

  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(NodeId u, NodeId v) const;

  const std::string& label(NodeId v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<NodeId> find(std::string_view label) const;

  /// Each undirected edge once, as (u, v) with u < v, in id order.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

struct EdgeListFile {
  Graph graph;
  EdgeCleanup cleanup;
};

/// Reads a whitespace-separated edge list ('#' starts a comment line).
/// Labels are mapped to ids in first-seen order.
EdgeListFile load_edge_list(const std::filesystem::path& path);
EdgeListFile read_edge_list(std::istream& in);

void write_edge_list(const Graph& g, std::ostream& out);
void save_edge_list(const Graph& g, const std::filesystem::path& path);

/// Nodes at BFS distance exactly k from x, for every x and k <= k_star.
class KHopIndex {
 public:
  KHopIndex() = default;
  KHopIndex(const Graph& g, int k_star);

  int k_star() const { return k_star_; }
  std::size_t node_count() const { return node_count_; }

  /// Sorted ids of N_k(x); empty when k exceeds the eccentricity of x.
  std::span<const NodeId> layer(NodeId x, int k) const {
    const std::size_t slot = static_cast<std::size_t>(x) * (k_star_ + 1) + k;
    return {ids_.data() + offsets_[slot], ids_.data() + offsets_[slot + 1]};
  }

 private:
  int k_star_ = 0;
  std::size_t node_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> ids_;
};

KHopIndex khop_neighborhoods(const Graph& g, int k_star);

/// BFS hop distances from `source`; unreachable nodes hold kUnreachable.
std::vector<std::uint32_t> shortest_path_lengths(const Graph& g, NodeId source);

/// Dense all-pairs hop distances, row-major. Quadratic memory.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(const Graph& g);
  std::uint32_t operator()(NodeId a, NodeId b) const {
    return dist_[static_cast<std::size_t>(a) * n_ + b];
  }
  std::size_t node_count() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> dist_;
};

/// Node-induced subgraph; node i of the result is nodes[i] of g (labels kept).
Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// Uniform sample of `count` distinct nodes, returned sorted.
std::vector<NodeId> sample_nodes(std::size_t node_count, std::size_t count,
                                 std::uint64_t seed);

}  // namespace flatstruct
