#include "flatstruct/simgraph.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace flatstruct {

double weight_transform_linear(double dist) {
  if (!(dist >= 0.0)) throw std::invalid_argument("distance must be >= 0");
  return 1.0 / (dist + kLinearEpsilon);
}

double weight_transform_exponential(double dist, double wt) {
  if (!(wt > 1.0)) throw std::invalid_argument("exponential transform base must be > 1");
  if (!(dist >= 0.0)) throw std::invalid_argument("distance must be >= 0");
  return std::max(std::exp(-dist * std::log(wt)), DBL_MIN);
}

double WeightTransform::operator()(double dist) const {
  return kind == TransformKind::linear ? weight_transform_linear(dist)
                                       : weight_transform_exponential(dist, base);
}

void WeightTransform::validate() const {
  if (kind == TransformKind::exponential && !(base > 1.0)) {
    throw std::invalid_argument("exponential transform base must be > 1");
  }
}

SimilarityGraph::SimilarityGraph(std::size_t n, const std::vector<std::pair<Edge, double>>& edges,
                                 BuildMode mode, WeightTransform transform)
    : mode_(mode), transform_(transform) {
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [e, w] : edges) {
    if (e.first >= e.second || e.second >= n) throw std::invalid_argument("bad similarity edge");
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("similarity weight must be > 0");
    ++deg[e.first];
    ++deg[e.second];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  targets_.resize(offsets_.back());
  weights_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [e, w] : edges) {
    targets_[fill[e.first]] = e.second;
    weights_[fill[e.first]++] = w;
    targets_[fill[e.second]] = e.first;
    weights_[fill[e.second]++] = w;
  }
  // Rows sorted by neighbor id.
  std::vector<std::size_t> idx;
  std::vector<NodeId> t;
  std::vector<double> wv;
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t b = offsets_[x], e = offsets_[x + 1];
    if (std::is_sorted(targets_.begin() + b, targets_.begin() + e)) continue;
    idx.resize(e - b);
    std::iota(idx.begin(), idx.end(), b);
    std::sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) { return targets_[p] < targets_[q]; });
    t.clear();
    wv.clear();
    for (std::size_t p : idx) {
      t.push_back(targets_[p]);
      wv.push_back(weights_[p]);
    }
    std::copy(t.begin(), t.end(), targets_.begin() + b);
    std::copy(wv.begin(), wv.end(), weights_.begin() + b);
  }
}

double SimilarityGraph::weight(NodeId x, NodeId y) const {
  const auto nb = neighbors(x);
  const auto it = std::lower_bound(nb.begin(), nb.end(), y);
  if (it == nb.end() || *it != y) return 0.0;
  return weights(x)[it - nb.begin()];
}

std::vector<double> SimilarityGraph::transition_row(NodeId x) const {
  const auto w = weights(x);
  if (w.empty()) throw std::invalid_argument("node has no neighbors in the similarity graph");
  double total = 0.0;
  for (double v : w) total += v;
  std::vector<double> p(w.begin(), w.end());
  for (double& v : p) v /= total;
  return p;
}

namespace {

void check_dense_cap(const StructuralDistance& sd, std::size_t cap) {
  if (sd.graph().node_count() > cap) {
    throw std::invalid_argument("dense similarity graph over " + std::to_string(cap) +
                                " nodes; use the pruned build or raise the cap");
  }
}

// Pairs are always scored as (min, max) so every build agrees bit for bit.
double pair_weight(const StructuralDistance& sd, const WeightTransform& t, NodeId a, NodeId b) {
  return t(sd.total(std::min(a, b), std::max(a, b)));
}

}  // namespace

SimilarityGraph build_dense(const StructuralDistance& sd, const WeightTransform& transform,
                            std::size_t node_cap, BuildStats* stats) {
  transform.validate();
  check_dense_cap(sd, node_cap);
  const std::size_t n = sd.graph().node_count();
  std::vector<std::vector<double>> rows(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(n); ++xi) {
    const auto x = static_cast<NodeId>(xi);
    auto& row = rows[x];
    row.reserve(n - x - 1);
    for (NodeId y = x + 1; y < n; ++y) row.push_back(pair_weight(sd, transform, x, y));
  }
  std::vector<std::pair<Edge, double>> edges;
  edges.reserve(n * (n - (n > 0)) / 2);
  for (NodeId x = 0; x < n; ++x) {
    for (NodeId y = x + 1; y < n; ++y) edges.push_back({{x, y}, rows[x][y - x - 1]});
    std::vector<double>().swap(rows[x]);
  }
  if (stats) {
    *stats = {};
    stats->evaluations = edges.size();
  }
  return SimilarityGraph(n, edges, BuildMode::dense, transform);
}

SimilarityGraph build_dense_serial(const StructuralDistance& sd, const WeightTransform& transform,
                                   std::size_t node_cap) {
  transform.validate();
  check_dense_cap(sd, node_cap);
  const std::size_t n = sd.graph().node_count();
  std::vector<std::pair<Edge, double>> edges;
  for (NodeId x = 0; x < n; ++x)
    for (NodeId y = x + 1; y < n; ++y) edges.push_back({{x, y}, pair_weight(sd, transform, x, y)});
  return SimilarityGraph(n, edges, BuildMode::dense, transform);
}

std::size_t candidate_window(std::size_t n, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("candidate constant c must be > 0");
  if (n < 2) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c * std::log2(static_cast<double>(n)))));
}

SimilarityGraph build_pruned(const StructuralDistance& sd, const WeightTransform& transform,
                             double c, BuildStats* stats) {
  transform.validate();
  const std::size_t n = sd.graph().node_count();
  const std::size_t b = candidate_window(n, c);

  // position[l][x] = rank of x in list l; order[l] = the list itself.
  std::vector<std::vector<NodeId>> order;
  std::vector<std::vector<std::uint32_t>> position;
  for (std::size_t i = 0; i < sd.indicator_count(); ++i) {
    for (int k = 0; k <= sd.k_star(); ++k) {
      if (sd.weights().weight(i, k) <= 0.0) continue;
      const auto& prof = sd.profile(i);
      std::vector<NodeId> list(n);
      std::iota(list.begin(), list.end(), NodeId{0});
      std::sort(list.begin(), list.end(), [&](NodeId a, NodeId bb) {
        const double ka = prof.key(a, k), kb = prof.key(bb, k);
        return ka < kb || (ka == kb && a < bb);
      });
      std::vector<std::uint32_t> pos(n);
      for (std::size_t p = 0; p < n; ++p) pos[list[p]] = static_cast<std::uint32_t>(p);
      order.push_back(std::move(list));
      position.push_back(std::move(pos));
    }
  }
  if (order.empty() && n > 1) {
    throw std::invalid_argument("pruned build needs at least one positively weighted indicator");
  }

  std::vector<std::vector<std::pair<NodeId, double>>> upper(n);
  std::uint64_t evaluations = 0;
#pragma omp parallel reduction(+ : evaluations)
  {
    std::vector<NodeId> cand;
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(n); ++xi) {
      const auto x = static_cast<NodeId>(xi);
      cand.clear();
      for (std::size_t l = 0; l < order.size(); ++l) {
        const std::size_t p = position[l][x];
        const std::size_t lo = p >= b ? p - b : 0;
        const std::size_t hi = std::min(n - 1, p + b);
        for (std::size_t q = lo; q <= hi; ++q) {
          const NodeId y = order[l][q];
          if (y > x) cand.push_back(y);
        }
      }
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      auto& out = upper[x];
      out.reserve(cand.size());
      for (NodeId y : cand) out.emplace_back(y, pair_weight(sd, transform, x, y));
      evaluations += cand.size();
    }
  }

  std::vector<std::pair<Edge, double>> edges;
  edges.reserve(evaluations);
  for (NodeId x = 0; x < n; ++x) {
    for (const auto& [y, w] : upper[x]) edges.push_back({{x, y}, w});
    std::vector<std::pair<NodeId, double>>().swap(upper[x]);
  }
  if (stats) {
    stats->evaluations = evaluations;
    stats->lists = order.size();
    stats->window = b;
  }
  return SimilarityGraph(n, edges, BuildMode::pruned, transform);
}

void write_simgraph(const Graph& g, const SimilarityGraph& sg, std::ostream& out) {
  char buf[32];
  for (NodeId x = 0; x < sg.node_count(); ++x) {
    const auto nb = sg.neighbors(x);
    const auto w = sg.weights(x);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (nb[j] <= x) continue;
      std::snprintf(buf, sizeof buf, "%.17g", w[j]);
      out << g.label(x) << ' ' << g.label(nb[j]) << ' ' << buf << '\n';
    }
  }
}

}  // namespace flatstruct
