#include "flatstruct/indicators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "flatstruct/parallel.hpp"

namespace flatstruct {

namespace {

IndicatorTable scalar_table(std::string name, std::size_t n) {
  IndicatorTable t;
  t.name = std::move(name);
  t.values.assign(n, 0.0);
  return t;
}

using Int = std::int64_t;

// Brandes single-source dependency accumulation into `acc`.
struct BrandesScratch {
  std::vector<std::int64_t> dist;
  std::vector<double> sigma, delta;
  std::vector<NodeId> order;

  explicit BrandesScratch(std::size_t n) : dist(n, -1), sigma(n, 0.0), delta(n, 0.0) {
    order.reserve(n);
  }

  void run(const Graph& g, NodeId s, std::vector<double>& acc) {
    order.clear();
    order.push_back(s);
    dist[s] = 0;
    sigma[s] = 1.0;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId u = order[head];
      for (NodeId w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[u] + 1) sigma[w] += sigma[u];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      const double coeff = (1.0 + delta[w]) / sigma[w];
      for (NodeId v : g.neighbors(w)) {
        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] * coeff;
      }
      if (w != s) acc[w] += delta[w];
    }
    for (NodeId v : order) {
      dist[v] = -1;
      sigma[v] = 0.0;
      delta[v] = 0.0;
    }
  }
};

}  // namespace

std::string_view indicator_name(IndicatorKind kind) {
  switch (kind) {
    case IndicatorKind::degree: return "degree";
    case IndicatorKind::clustering: return "clustering";
    case IndicatorKind::closeness: return "closeness";
    case IndicatorKind::betweenness: return "betweenness";
    case IndicatorKind::eigenvector: return "eigenvector";
    case IndicatorKind::core_number: return "core_number";
    case IndicatorKind::gdv: return "gdv";
    case IndicatorKind::anon_walk_distinct: return "anon_walk_distinct";
    case IndicatorKind::anon_walk_start_count: return "anon_walk_start_count";
    case IndicatorKind::random_walk_occurrence: return "random_walk_occurrence";
  }
  return "?";
}

const std::vector<IndicatorKind>& all_indicator_kinds() {
  static const std::vector<IndicatorKind> kinds{
      IndicatorKind::degree,      IndicatorKind::clustering,
      IndicatorKind::closeness,   IndicatorKind::betweenness,
      IndicatorKind::eigenvector, IndicatorKind::core_number,
      IndicatorKind::gdv,         IndicatorKind::anon_walk_distinct,
      IndicatorKind::anon_walk_start_count, IndicatorKind::random_walk_occurrence,
  };
  return kinds;
}

IndicatorKind parse_indicator_kind(std::string_view name) {
  for (IndicatorKind k : all_indicator_kinds()) {
    if (indicator_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown indicator '" + std::string(name) + "'");
}

IndicatorTable degree(const Graph& g) {
  auto t = scalar_table("degree", g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) t.values[v] = static_cast<double>(g.degree(v));
  return t;
}

IndicatorTable clustering_coefficient(const Graph& g) {
  const std::size_t n = g.node_count();
  auto t = scalar_table("clustering", n);
#pragma omp parallel
  {
    std::vector<NodeId> mark(n, kUnreachable);
#pragma omp for schedule(dynamic, 64)
    for (Int vi = 0; vi < static_cast<Int>(n); ++vi) {
      const auto v = static_cast<NodeId>(vi);
      const auto d = g.degree(v);
      if (d < 2) continue;
      for (NodeId u : g.neighbors(v)) mark[u] = v;
      std::size_t links = 0;
      for (NodeId u : g.neighbors(v)) {
        for (NodeId w : g.neighbors(u)) {
          if (w > u && mark[w] == v) ++links;
        }
      }
      t.values[v] = 2.0 * static_cast<double>(links) / (static_cast<double>(d) * (d - 1));
    }
  }
  return t;
}

IndicatorTable closeness_centrality(const Graph& g) {
  const std::size_t n = g.node_count();
  auto t = scalar_table("closeness", n);
#pragma omp parallel
  {
    std::vector<std::uint32_t> dist(n, kUnreachable);
    std::vector<NodeId> queue;
    queue.reserve(n);
#pragma omp for schedule(dynamic, 16)
    for (Int si = 0; si < static_cast<Int>(n); ++si) {
      const auto s = static_cast<NodeId>(si);
      queue.assign(1, s);
      dist[s] = 0;
      std::uint64_t total = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        total += dist[u];
        for (NodeId w : g.neighbors(u)) {
          if (dist[w] != kUnreachable) continue;
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
      if (total > 0) {
        t.values[s] = static_cast<double>(queue.size() - 1) / static_cast<double>(total);
      }
      for (NodeId u : queue) dist[u] = kUnreachable;
    }
  }
  return t;
}

IndicatorTable betweenness_centrality(const Graph& g) {
  const std::size_t n = g.node_count();
  auto t = scalar_table("betweenness", n);
  if (n == 0) return t;
  // Sources are split into a fixed number of blocks and block sums are added
  // in block order, so the result does not depend on the thread count.
  constexpr std::size_t kMaxBlocks = 128;
  const std::size_t block = std::max<std::size_t>(64, (n + kMaxBlocks - 1) / kMaxBlocks);
  const std::size_t blocks = (n + block - 1) / block;
  std::vector<std::vector<double>> partial(blocks);
#pragma omp parallel
  {
    BrandesScratch scratch(n);
#pragma omp for schedule(dynamic, 1)
    for (Int b = 0; b < static_cast<Int>(blocks); ++b) {
      auto& acc = partial[b];
      acc.assign(n, 0.0);
      const std::size_t end = std::min(n, (b + 1) * block);
      for (std::size_t s = b * block; s < end; ++s) scratch.run(g, static_cast<NodeId>(s), acc);
    }
  }
  for (const auto& acc : partial)
    for (std::size_t v = 0; v < n; ++v) t.values[v] += acc[v];
  for (double& x : t.values) x *= 0.5;
  return t;
}

IndicatorTable betweenness_centrality_serial(const Graph& g) {
  const std::size_t n = g.node_count();
  auto t = scalar_table("betweenness", n);
  BrandesScratch scratch(n);
  for (NodeId s = 0; s < n; ++s) scratch.run(g, s, t.values);
  for (double& x : t.values) x *= 0.5;
  return t;
}

EigenvectorResult eigenvector_centrality(const Graph& g, int iterations, double tolerance) {
  if (iterations < 1) throw std::invalid_argument("eigenvector iterations must be >= 1");
  const std::size_t n = g.node_count();
  EigenvectorResult r;
  r.table = scalar_table("eigenvector", n);
  if (n == 0) {
    r.converged = true;
    return r;
  }
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  for (int it = 1; it <= iterations; ++it) {
#pragma omp parallel for schedule(static)
    for (Int vi = 0; vi < static_cast<Int>(n); ++vi) {
      const auto v = static_cast<NodeId>(vi);
      double s = x[v];
      for (NodeId u : g.neighbors(v)) s += x[u];
      y[v] = s;
    }
    double norm = 0.0;
    for (double a : y) norm += a * a;
    norm = std::sqrt(norm);
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      y[v] /= norm;
      change = std::max(change, std::abs(y[v] - x[v]));
    }
    x.swap(y);
    r.iterations = it;
    if (change < tolerance) {
      r.converged = true;
      break;
    }
  }
  r.table.values = std::move(x);
  return r;
}

IndicatorTable core_number(const Graph& g) {
  // Batagelj-Zaversnik bucket peeling.
  const std::size_t n = g.node_count();
  auto t = scalar_table("core_number", n);
  if (n == 0) return t;
  std::vector<std::size_t> deg(n), pos(n), vert(n);
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    max_deg = std::max(max_deg, deg[v]);
  }
  std::vector<std::size_t> bin(max_deg + 1, 0);
  for (std::size_t d : deg) ++bin[d];
  std::size_t start = 0;
  for (auto& b : bin) {
    const std::size_t c = b;
    b = start;
    start += c;
  }
  for (NodeId v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    vert[pos[v]] = v;
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  bin[0] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = vert[i];
    for (NodeId u : g.neighbors(static_cast<NodeId>(v))) {
      if (deg[u] > deg[v]) {
        const std::size_t du = deg[u];
        const std::size_t pu = pos[u];
        const std::size_t pw = bin[du];
        const std::size_t w = vert[pw];
        if (u != w) {
          pos[u] = pw;
          vert[pu] = w;
          pos[w] = pu;
          vert[pw] = u;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  for (NodeId v = 0; v < n; ++v) t.values[v] = static_cast<double>(deg[v]);
  return t;
}

std::vector<int> anonymize_walk(std::span<const NodeId> walk, AnonymousRule rule) {
  std::vector<int> out(walk.size());
  int next_rank = 1;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    std::size_t first = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (walk[j] == walk[i]) {
        first = j;
        break;
      }
    }
    if (first < i) {
      out[i] = out[first];
    } else {
      out[i] = rule == AnonymousRule::min_position ? static_cast<int>(i) + 1 : next_rank++;
    }
  }
  return out;
}

namespace {

// Uniform walk of up to `len` nodes from `start`; stops at isolated nodes.
void uniform_walk(const Graph& g, NodeId start, int len, SplitMix64& rng,
                  std::vector<NodeId>& walk) {
  walk.assign(1, start);
  NodeId cur = start;
  for (int step = 1; step < len; ++step) {
    const auto nb = g.neighbors(cur);
    if (nb.empty()) break;
    cur = nb[rng.below(nb.size())];
    walk.push_back(cur);
  }
}

}  // namespace

AnonymousWalkTables anonymous_walk_stats(const Graph& g, int walk_len, int walks_per_node,
                                         std::uint64_t seed, AnonymousRule rule) {
  if (walk_len < 2) throw std::invalid_argument("anonymous walk length must be >= 2");
  if (walks_per_node < 1) throw std::invalid_argument("walks per node must be >= 1");
  const std::size_t n = g.node_count();
  AnonymousWalkTables out{scalar_table("anon_walk_distinct", n),
                          scalar_table("anon_walk_start_count", n)};
#pragma omp parallel
  {
    std::vector<NodeId> walk;
#pragma omp for schedule(dynamic, 64)
    for (Int vi = 0; vi < static_cast<Int>(n); ++vi) {
      const auto v = static_cast<NodeId>(vi);
      std::uint64_t distinct = 0, start = 0;
      for (int j = 0; j < walks_per_node; ++j) {
        SplitMix64 rng(derive_seed(seed, v, static_cast<std::uint64_t>(j)));
        uniform_walk(g, v, walk_len, rng, walk);
        auto seq = anonymize_walk(walk, rule);
        start += static_cast<std::uint64_t>(std::count(seq.begin(), seq.end(), seq.front()));
        std::sort(seq.begin(), seq.end());
        distinct += static_cast<std::uint64_t>(std::unique(seq.begin(), seq.end()) - seq.begin());
      }
      out.distinct.values[v] = static_cast<double>(distinct) / walks_per_node;
      out.start_count.values[v] = static_cast<double>(start) / walks_per_node;
    }
  }
  return out;
}

IndicatorTable random_walk_occurrences(const Graph& g, int walk_len, int walks_per_node,
                                       std::uint64_t seed) {
  if (walk_len < 1) throw std::invalid_argument("random walk length must be >= 1");
  if (walks_per_node < 1) throw std::invalid_argument("walks per node must be >= 1");
  const std::size_t n = g.node_count();
  auto t = scalar_table("random_walk_occurrence", n);
  std::vector<std::uint64_t> counts(n, 0);
  std::uint64_t total = 0;
#pragma omp parallel reduction(+ : total)
  {
    std::vector<NodeId> walk;
#pragma omp for schedule(dynamic, 64)
    for (Int vi = 0; vi < static_cast<Int>(n); ++vi) {
      const auto v = static_cast<NodeId>(vi);
      for (int j = 0; j < walks_per_node; ++j) {
        SplitMix64 rng(derive_seed(seed ^ 0x5bd1e995ULL, v, static_cast<std::uint64_t>(j)));
        uniform_walk(g, v, walk_len, rng, walk);
        total += walk.size();
        for (NodeId u : walk) {
#pragma omp atomic
          ++counts[u];
        }
      }
    }
  }
  if (total > 0) {
    for (std::size_t v = 0; v < n; ++v) {
      t.values[v] = static_cast<double>(counts[v]) / static_cast<double>(total);
    }
  }
  return t;
}

IndicatorTable compute_indicator(const Graph& g, IndicatorKind kind, const IndicatorOptions& o) {
  switch (kind) {
    case IndicatorKind::degree: return degree(g);
    case IndicatorKind::clustering: return clustering_coefficient(g);
    case IndicatorKind::closeness: return closeness_centrality(g);
    case IndicatorKind::betweenness: return betweenness_centrality(g);
    case IndicatorKind::eigenvector:
      return eigenvector_centrality(g, o.eig_iterations, o.eig_tolerance).table;
    case IndicatorKind::core_number: return core_number(g);
    case IndicatorKind::gdv: return gdv(g);
    case IndicatorKind::anon_walk_distinct:
      return anonymous_walk_stats(g, o.walk_len, o.walks_per_node, o.seed, o.anon_rule).distinct;
    case IndicatorKind::anon_walk_start_count:
      return anonymous_walk_stats(g, o.walk_len, o.walks_per_node, o.seed, o.anon_rule)
          .start_count;
    case IndicatorKind::random_walk_occurrence:
      return random_walk_occurrences(g, o.walk_len, o.walks_per_node, o.seed);
  }
  throw std::logic_error("unhandled indicator kind");
}

void standardize(IndicatorTable& table) {
  const std::size_t n = table.node_count();
  if (n == 0) return;
  for (std::size_t c = 0; c < table.width; ++c) {
    double mean = 0.0;
    for (std::size_t v = 0; v < n; ++v) mean += table.values[v * table.width + c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const double d = table.values[v * table.width + c] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t v = 0; v < n; ++v) {
      double& x = table.values[v * table.width + c];
      x = sd > 0.0 ? (x - mean) / sd : 0.0;
    }
  }
}

void write_indicator_tsv(const Graph& g, std::span<const IndicatorTable> tables,
                         std::ostream& out) {
  out << "label";
  for (const auto& t : tables) {
    if (t.node_count() != g.node_count()) {
      throw std::invalid_argument("indicator table '" + t.name + "' has wrong node count");
    }
    if (t.width == 1) {
      out << '\t' << t.name;
    } else {
      for (std::size_t c = 0; c < t.width; ++c) out << '\t' << t.name << '.' << c;
    }
  }
  out << '\n';
  char buf[32];
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out << g.label(v);
    for (const auto& t : tables) {
      for (double x : t.row(v)) {
        std::snprintf(buf, sizeof buf, "%.10g", x);
        out << '\t' << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace flatstruct
