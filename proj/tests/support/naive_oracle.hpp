#pragma once

// Brute-force references shared by the similarity tests and the acceptance
// binary. Nothing here calls the library's distance code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "flatstruct/similarity.hpp"

namespace oracle {

using namespace flatstruct;

inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

inline ComparisonSpec dtw_spec(ElementDistance d) {
  ComparisonSpec s;
  s.mode = CompareMode::sorted_dtw;
  s.element = d;
  return s;
}

inline ComparisonSpec agg_spec(std::vector<std::pair<Aggregator, double>> aggs,
                        SetCombiner c = SetCombiner::difference) {
  ComparisonSpec s;
  s.aggregators = std::move(aggs);
  s.combiner = c;
  return s;
}

inline ComparisonSpec vec_spec(VectorMetric m) {
  ComparisonSpec s;
  s.mode = CompareMode::aggregate_vector;
  s.metric = m;
  return s;
}

// --- naive reference -------------------------------------------------------
// Everything below recomputes from scratch: Floyd-Warshall layers, a
// recursive DTW and textbook aggregates. It only covers the spec shapes the
// oracle test draws from.

inline std::vector<std::vector<int>> fw(const Graph& g) {
  const int n = static_cast<int>(g.node_count());
  std::vector<std::vector<int>> d(n, std::vector<int>(n, 1 << 20));
  for (int u = 0; u < n; ++u) {
    d[u][u] = 0;
    for (NodeId v : g.neighbors(u)) d[u][v] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline double naive_dtw(const std::vector<double>& a, const std::vector<double>& b,
                 const std::function<double(double, double)>& cost) {
  std::map<std::pair<int, int>, double> memo;
  std::function<double(int, int)> rec = [&](int i, int j) -> double {
    if (i == 0 && j == 0) return cost(a[0], b[0]);
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    double best = INFINITY;
    if (i > 0) best = std::min(best, rec(i - 1, j));
    if (j > 0) best = std::min(best, rec(i, j - 1));
    if (i > 0 && j > 0) best = std::min(best, rec(i - 1, j - 1));
    return memo[{i, j}] = cost(a[i], b[j]) + best;
  };
  return rec(static_cast<int>(a.size()) - 1, static_cast<int>(b.size()) - 1);
}

inline double naive_agg(std::vector<double> v, Aggregator agg) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += x;
  const double m = s / v.size();
  switch (agg) {
    case Aggregator::mean: return m;
    case Aggregator::sum: return s;
    case Aggregator::max: return v.back();
    case Aggregator::min: return v.front();
    case Aggregator::median:
      return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    default: {
      double q = 0;
      for (double x : v) q += (x - m) * (x - m);
      return q / v.size();  // variance only
    }
  }
}

inline double naive_f(const std::vector<std::vector<double>>& A, const std::vector<std::vector<double>>& B,
               const ComparisonSpec& spec) {
  if (A.empty() && B.empty()) return 0.0;
  const std::size_t w = !A.empty() ? A[0].size() : B[0].size();
  auto col = [](const std::vector<std::vector<double>>& S, std::size_t c) {
    std::vector<double> out;
    for (const auto& r : S) out.push_back(r[c]);
    return out;
  };
  if (spec.mode == CompareMode::sorted_dtw) {
    auto a = col(A, 0), b = col(B, 0);
    if (a.empty()) a = {0.0};
    if (b.empty()) b = {0.0};
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double sh = spec.ratio_shift;
    return naive_dtw(a, b, [&](double x, double y) {
      if (spec.element == ElementDistance::absolute) return std::fabs(x - y);
      return std::max(x + sh, y + sh) / std::min(x + sh, y + sh) - 1.0;
    });
  }
  if (spec.mode == CompareMode::aggregate_scalar) {
    double s = 0;
    for (auto [agg, c] : spec.aggregators) {
      const double a = naive_agg(col(A, 0), agg), b = naive_agg(col(B, 0), agg);
      const double sh = spec.ratio_shift;
      s += c * (spec.combiner == SetCombiner::difference
                    ? std::fabs(a - b)
                    : std::max(a + sh, b + sh) / std::min(a + sh, b + sh) - 1.0);
    }
    return s;
  }
  // euclidean over column means
  double s = 0;
  for (std::size_t c = 0; c < w; ++c) {
    const double d = naive_agg(col(A, c), Aggregator::mean) - naive_agg(col(B, c), Aggregator::mean);
    s += d * d;
  }
  return spec.aggregators.front().second * std::sqrt(s);
}

inline double naive_total(const Graph& g, const std::vector<IndicatorTable>& tables,
                   const std::vector<ComparisonSpec>& specs,
                   const std::vector<std::vector<double>>& w, int k_star, NodeId x, NodeId y) {
  const auto d = fw(g);
  double total = 0;
  for (int k = 0; k <= k_star; ++k) {
    for (std::size_t i = 0; i < tables.size(); ++i) {
      std::vector<std::vector<double>> A, B;
      for (NodeId u = 0; u < g.node_count(); ++u) {
        std::vector<double> row(tables[i].row(u).begin(), tables[i].row(u).end());
        if (d[x][u] == k) A.push_back(row);
        if (d[y][u] == k) B.push_back(row);
      }
      total += w[i][k] * naive_f(A, B, specs[i]);
    }
  }
  return total;
}

}  // namespace oracle
