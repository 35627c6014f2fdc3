#pragma once

#include <cstdint>

#include "flatstruct/graph.hpp"

namespace flatstruct {

/// Zachary's karate club: 34 nodes, 78 edges, labels "1".."34".
Graph karate_club();

/// Two copies of the karate club joined by one bridge edge.
///
/// Labels follow the 1..68 numbering used in the published figures of this
/// dataset: label L lives at id L-1, copy one holds labels 1..34 and copy two
/// holds their mirrors. The mirror numbering is not a constant offset: it is
/// pinned for 1/37, 2/38, 3/39, 12/67, 17/52, 25/44, 26/57, 33/51, 34/42, and
/// the remaining karate nodes take the unused labels 35..68 in increasing
/// order. The bridge joins label 1 and its mirror, label 37.
Graph generate_mirrored_karate();

/// Id of the mirror of `v` in generate_mirrored_karate() (an involution).
NodeId karate_mirror(NodeId v);

/// Ids of the bridge endpoints in generate_mirrored_karate().
inline constexpr NodeId kKarateBridgeA = 0;   // label 1
inline constexpr NodeId kKarateBridgeB = 36;  // label 37

/// Two K_m cliques joined through a path of `path_len` nodes.
///
/// Id layout: clique A is [0, m) with connector m-1; the path is
/// [m, m+path_len); clique B is [m+path_len, 2m+path_len) with connector
/// m+path_len. Requires clique_size >= 3 and path_len >= 1.
Graph generate_barbell(int clique_size, int path_len);

struct BarbellConnectors {
  NodeId a;
  NodeId b;
};
BarbellConnectors barbell_connectors(int clique_size, int path_len);

/// G(n, p) with p = avg_degree / (n - 1), sampled by geometric skipping.
Graph erdos_renyi(std::size_t n, double avg_degree, std::uint64_t seed);

/// Preferential attachment: each new node links to `links` existing nodes.
Graph preferential_attachment(std::size_t n, std::size_t links, std::uint64_t seed);

}  // namespace flatstruct
