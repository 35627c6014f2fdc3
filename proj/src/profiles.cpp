#include <algorithm>
#include <cmath>
#include <numeric>

#include "flatstruct/similarity.hpp"

namespace flatstruct {

namespace {

void sort_rows_inplace(std::vector<double>& v, std::size_t width) {
  if (width == 1) {
    std::sort(v.begin(), v.end());
    return;
  }
  const std::size_t n = v.size() / width;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(v.begin() + a * width, v.begin() + (a + 1) * width,
                                        v.begin() + b * width, v.begin() + (b + 1) * width);
  });
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i : idx) out.insert(out.end(), v.begin() + i * width, v.begin() + (i + 1) * width);
  v.swap(out);
}

}  // namespace

NeighborhoodProfile::NeighborhoodProfile(const IndicatorTable& table, const ComparisonSpec& spec,
                                         const KHopIndex& hops)
    : k_star_(hops.k_star()) {
  const std::size_t n = hops.node_count();
  const std::size_t width = table.width;
  const std::size_t layers = static_cast<std::size_t>(k_star_) + 1;
  raw_ = spec.mode == CompareMode::sorted_dtw ||
         (spec.mode == CompareMode::aggregate_vector &&
          (spec.metric == VectorMetric::jaccard || spec.metric == VectorMetric::hamming));
  if (raw_) {
    stride_ = width;
  } else if (spec.mode == CompareMode::aggregate_scalar) {
    stride_ = spec.aggregators.size();
  } else {
    stride_ = width;
  }

  counts_.assign(n * layers, 0);
  keys_.assign(n * layers, 0.0);
  std::vector<std::vector<double>> per_node(n);

#pragma omp parallel
  {
    std::vector<double> vals, col;
#pragma omp for schedule(dynamic, 32)
    for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(n); ++xi) {
      const auto x = static_cast<NodeId>(xi);
      auto& out = per_node[x];
      for (std::size_t k = 0; k < layers; ++k) {
        const auto layer = hops.layer(x, static_cast<int>(k));
        const std::size_t slot = x * layers + k;
        counts_[slot] = static_cast<std::uint32_t>(layer.size());
        vals.clear();
        for (NodeId u : layer) {
          const auto r = table.row(u);
          vals.insert(vals.end(), r.begin(), r.end());
        }
        // Sort key: mean, or L1 norm of the column means. Columns are summed
        // in sorted order so twins get identical keys.
        if (!layer.empty()) {
          double key = 0.0;
          for (std::size_t c = 0; c < width; ++c) {
            col.clear();
            for (std::size_t r = 0; r < layer.size(); ++r) col.push_back(vals[r * width + c]);
            std::sort(col.begin(), col.end());
            const double m = aggregate(col, Aggregator::mean);
            key += width == 1 ? m : std::abs(m);
          }
          keys_[slot] = key;
        }
        if (raw_) {
          sort_rows_inplace(vals, width);
          out.insert(out.end(), vals.begin(), vals.end());
        } else if (spec.mode == CompareMode::aggregate_scalar) {
          // Sorted first so equal multisets give bit-identical aggregates.
          std::sort(vals.begin(), vals.end());
          for (const auto& [agg, c] : spec.aggregators) out.push_back(aggregate(vals, agg));
        } else {
          const Aggregator agg = spec.aggregators.front().first;
          for (std::size_t c = 0; c < width; ++c) {
            col.clear();
            for (std::size_t r = 0; r < layer.size(); ++r) col.push_back(vals[r * width + c]);
            std::sort(col.begin(), col.end());
            out.push_back(aggregate(col, agg));
          }
        }
      }
    }
  }

  offsets_.assign(n * layers + 1, 0);
  std::size_t total = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t k = 0; k < layers; ++k) {
      offsets_[x * layers + k] = total;
      total += raw_ ? counts_[x * layers + k] * width : stride_;
    }
  }
  offsets_[n * layers] = total;
  data_.reserve(total);
  for (auto& v : per_node) {
    data_.insert(data_.end(), v.begin(), v.end());
    std::vector<double>().swap(v);
  }
}

}  // namespace flatstruct
