#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flatstruct/graph.hpp"

namespace flatstruct {

/// Per-node values of one graph indicator, node-major.
///
/// Scalar tables have width 1. Vector tables (GDV) hold `width` entries per
/// node; the entries are integer counts stored as doubles.
struct IndicatorTable {
  std::string name;
  std::size_t width = 1;
  bool vector = false;
  std::vector<double> values;

  std::size_t node_count() const { return width ? values.size() / width : 0; }
  double scalar(NodeId v) const { return values[v]; }
  std::span<const double> row(NodeId v) const {
    return {values.data() + static_cast<std::size_t>(v) * width, width};
  }
};

enum class IndicatorKind {
  degree,
  clustering,
  closeness,
  betweenness,
  eigenvector,
  core_number,
  gdv,
  anon_walk_distinct,
  anon_walk_start_count,
  random_walk_occurrence,
};

/// How walk positions are turned into integers.
/// min_position: f(v) = first position of v in the walk, so (a,b,a,c) -> (1,2,1,4).
/// first_rank:   f(v) = order of first appearance, so (a,b,a,c) -> (1,2,1,3).
enum class AnonymousRule { min_position, first_rank };

struct IndicatorOptions {
  int walk_len = 10;
  int walks_per_node = 10;
  std::uint64_t seed = 0;
  int eig_iterations = 100;
  double eig_tolerance = 1e-8;
  AnonymousRule anon_rule = AnonymousRule::min_position;
};

std::string_view indicator_name(IndicatorKind kind);
/// Throws std::invalid_argument for unknown names.
IndicatorKind parse_indicator_kind(std::string_view name);
const std::vector<IndicatorKind>& all_indicator_kinds();

IndicatorTable degree(const Graph& g);
IndicatorTable clustering_coefficient(const Graph& g);
IndicatorTable closeness_centrality(const Graph& g);

/// Unnormalized; each unordered pair counted once.
IndicatorTable betweenness_centrality(const Graph& g);
/// Single-threaded reference for the parallel kernel above.
IndicatorTable betweenness_centrality_serial(const Graph& g);

struct EigenvectorResult {
  IndicatorTable table;
  bool converged = false;
  int iterations = 0;
};
/// Power iteration with L2 normalization. The iteration runs on A + I, which
/// has the same leading eigenvector as A but does not oscillate on bipartite
/// graphs.
EigenvectorResult eigenvector_centrality(const Graph& g, int iterations = 100,
                                         double tolerance = 1e-8);

IndicatorTable core_number(const Graph& g);

inline constexpr std::size_t kOrbitCount = 15;
/// Orbit counts 0..14 of the 2-, 3- and 4-node graphlets.
IndicatorTable gdv(const Graph& g);

/// Integer sequence of a walk under `rule`; values start at 1.
std::vector<int> anonymize_walk(std::span<const NodeId> walk,
                                AnonymousRule rule = AnonymousRule::min_position);

struct AnonymousWalkTables {
  IndicatorTable distinct;     // mean number of distinct integers
  IndicatorTable start_count;  // mean occurrences of the start node's integer
};
/// Uniform walks of `walk_len` nodes (including the start). A walk stops early
/// at an isolated node.
AnonymousWalkTables anonymous_walk_stats(const Graph& g, int walk_len, int walks_per_node,
                                         std::uint64_t seed,
                                         AnonymousRule rule = AnonymousRule::min_position);

/// Share of all visited positions that land on each node.
IndicatorTable random_walk_occurrences(const Graph& g, int walk_len, int walks_per_node,
                                       std::uint64_t seed);

IndicatorTable compute_indicator(const Graph& g, IndicatorKind kind,
                                 const IndicatorOptions& opts = {});

/// Zero mean, unit variance per column. Constant columns become 0.
void standardize(IndicatorTable& table);

/// label<TAB>value(s), one node per line, preceded by a header line.
void write_indicator_tsv(const Graph& g, std::span<const IndicatorTable> tables,
                         std::ostream& out);

}  // namespace flatstruct
