#include "flatstruct/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace flatstruct {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<std::string_view, E> (&table)[N],
             const char* what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E e, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::pair<std::string_view, CompareMode> kModes[] = {
    {"sorted_dtw", CompareMode::sorted_dtw},
    {"aggregate_scalar", CompareMode::aggregate_scalar},
    {"aggregate_vector", CompareMode::aggregate_vector},
};
constexpr std::pair<std::string_view, ElementDistance> kElements[] = {
    {"absolute", ElementDistance::absolute},
    {"ratio", ElementDistance::ratio},
};
constexpr std::pair<std::string_view, Aggregator> kAggregators[] = {
    {"mean", Aggregator::mean}, {"median", Aggregator::median},
    {"sum", Aggregator::sum},   {"min", Aggregator::min},
    {"max", Aggregator::max},   {"variance", Aggregator::variance},
    {"std", Aggregator::std},   {"iqr", Aggregator::iqr},
};
constexpr std::pair<std::string_view, SetCombiner> kCombiners[] = {
    {"difference", SetCombiner::difference},
    {"quotient", SetCombiner::quotient},
};
constexpr std::pair<std::string_view, VectorMetric> kMetrics[] = {
    {"euclidean", VectorMetric::euclidean}, {"manhattan", VectorMetric::manhattan},
    {"cosine", VectorMetric::cosine},       {"pearson", VectorMetric::pearson},
    {"spearman", VectorMetric::spearman},   {"jaccard", VectorMetric::jaccard},
    {"hamming", VectorMetric::hamming},
};
constexpr std::pair<std::string_view, CommunityVariant> kCommunity[] = {
    {"histogram_euclidean", CommunityVariant::histogram_euclidean},
    {"distinct_count_diff", CommunityVariant::distinct_count_diff},
};

bool raw_metric(VectorMetric m) {
  return m == VectorMetric::jaccard || m == VectorMetric::hamming;
}

double quantile_sorted(std::span<const double> s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson_distance(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  // Correlation is undefined for a constant vector.
  if (saa == 0.0 || sbb == 0.0) return saa == sbb ? 0.0 : 1.0;
  return 1.0 - std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

int compare_rows(const double* a, const double* b, std::size_t width) {
  for (std::size_t c = 0; c < width; ++c) {
    if (a[c] < b[c]) return -1;
    if (a[c] > b[c]) return 1;
  }
  return 0;
}

void sort_rows(std::vector<double>& v, std::size_t width) {
  if (width == 1) {
    std::sort(v.begin(), v.end());
    return;
  }
  const std::size_t n = v.size() / width;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return compare_rows(&v[a * width], &v[b * width], width) < 0;
  });
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i : idx) out.insert(out.end(), v.begin() + i * width, v.begin() + (i + 1) * width);
  v.swap(out);
}

// Multiset distances over lexicographically sorted rows.
double multiset_distance(std::span<const double> a, std::span<const double> b, std::size_t width,
                         VectorMetric m) {
  const std::size_t na = a.size() / width, nb = b.size() / width;
  if (na == 0 && nb == 0) return 0.0;
  if (m == VectorMetric::hamming) {
    const std::size_t common = std::min(na, nb);
    std::size_t diff = std::max(na, nb) - common;
    for (std::size_t i = 0; i < common; ++i)
      diff += compare_rows(&a[i * width], &b[i * width], width) != 0;
    return static_cast<double>(diff) / static_cast<double>(std::max(na, nb));
  }
  // Jaccard: shared = multiset intersection size.
  std::size_t i = 0, j = 0, shared = 0;
  while (i < na && j < nb) {
    const int c = compare_rows(&a[i * width], &b[j * width], width);
    if (c == 0) {
      ++shared;
      ++i;
      ++j;
    } else if (c < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return 1.0 - static_cast<double>(shared) / static_cast<double>(na + nb - shared);
}

double combine(double a, double b, const ComparisonSpec& spec) {
  if (spec.combiner == SetCombiner::difference) return std::abs(a - b);
  return ratio_distance(a + spec.ratio_shift, b + spec.ratio_shift);
}

void check_finite_input(std::span<const double> v) {
  for (double x : v) {
    if (std::isnan(x)) throw std::invalid_argument("NaN in indicator values");
  }
}

}  // namespace

std::string_view to_string(CompareMode m) { return enum_name(m, kModes); }
std::string_view to_string(ElementDistance d) { return enum_name(d, kElements); }
std::string_view to_string(Aggregator a) { return enum_name(a, kAggregators); }
std::string_view to_string(SetCombiner c) { return enum_name(c, kCombiners); }
std::string_view to_string(VectorMetric m) { return enum_name(m, kMetrics); }
CompareMode parse_compare_mode(std::string_view s) { return parse_enum(s, kModes, "mode"); }
ElementDistance parse_element_distance(std::string_view s) {
  return parse_enum(s, kElements, "element distance");
}
Aggregator parse_aggregator(std::string_view s) { return parse_enum(s, kAggregators, "aggregator"); }
SetCombiner parse_set_combiner(std::string_view s) { return parse_enum(s, kCombiners, "combiner"); }
VectorMetric parse_vector_metric(std::string_view s) { return parse_enum(s, kMetrics, "metric"); }
CommunityVariant parse_community_variant(std::string_view s) {
  return parse_enum(s, kCommunity, "community variant");
}

void validate_spec(const ComparisonSpec& spec, std::size_t width) {
  switch (spec.mode) {
    case CompareMode::sorted_dtw:
      if (width != 1) throw std::invalid_argument("sorted_dtw needs a scalar indicator");
      break;
    case CompareMode::aggregate_scalar:
      if (width != 1) throw std::invalid_argument("aggregate_scalar needs a scalar indicator");
      if (spec.aggregators.empty()) throw std::invalid_argument("no aggregators configured");
      break;
    case CompareMode::aggregate_vector:
      if (!raw_metric(spec.metric) && spec.aggregators.size() != 1) {
        throw std::invalid_argument("aggregate_vector takes exactly one aggregator");
      }
      break;
  }
  for (const auto& [agg, c] : spec.aggregators) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("aggregator coefficients must be finite and >= 0");
    }
  }
  if (spec.empty_value && !(*spec.empty_value >= 0.0)) {
    throw std::invalid_argument("empty-set value must be >= 0");
  }
}

double ratio_distance(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("ratio distance needs positive operands");
  }
  return std::max(a, b) / std::min(a, b) - 1.0;
}

double dtw(std::span<const double> a, std::span<const double> b, ElementDistance d,
           double ratio_shift) {
  if (a.empty() || b.empty()) {
    if (a.empty() && b.empty()) return 0.0;
    throw std::invalid_argument("dtw of an empty and a nonempty sequence");
  }
  auto cost = [&](double x, double y) {
    return d == ElementDistance::absolute ? std::abs(x - y)
                                          : ratio_distance(x + ratio_shift, y + ratio_shift);
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(b.size() + 1, inf), cur(b.size() + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = cost(a[i - 1], b[j - 1]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    prev.swap(cur);
  }
  return prev[b.size()];
}

double aggregate(std::span<const double> v, Aggregator agg) {
  if (v.empty()) return 0.0;
  const auto n = static_cast<double>(v.size());
  switch (agg) {
    case Aggregator::mean: return std::accumulate(v.begin(), v.end(), 0.0) / n;
    case Aggregator::sum: return std::accumulate(v.begin(), v.end(), 0.0);
    case Aggregator::min: return *std::min_element(v.begin(), v.end());
    case Aggregator::max: return *std::max_element(v.begin(), v.end());
    case Aggregator::variance:
    case Aggregator::std: {
      const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double s = 0.0;
      for (double x : v) s += (x - m) * (x - m);
      return agg == Aggregator::variance ? s / n : std::sqrt(s / n);
    }
    case Aggregator::median:
    case Aggregator::iqr: {
      std::vector<double> s(v.begin(), v.end());
      std::sort(s.begin(), s.end());
      if (agg == Aggregator::median) return quantile_sorted(s, 0.5);
      return quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    }
  }
  return 0.0;
}

double vector_distance(std::span<const double> a, std::span<const double> b, VectorMetric m) {
  if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
  if (std::equal(a.begin(), a.end(), b.begin())) return 0.0;
  switch (m) {
    case VectorMetric::euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
    case VectorMetric::manhattan: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
      return s;
    }
    case VectorMetric::cosine: {
      double ab = 0, aa = 0, bb = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
      }
      if (aa == 0.0 && bb == 0.0) return 0.0;
      if (aa == 0.0 || bb == 0.0) return 2.0;
      return 1.0 - std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
    }
    case VectorMetric::pearson: return pearson_distance(a, b);
    case VectorMetric::spearman: {
      const auto ra = average_ranks(a), rb = average_ranks(b);
      return pearson_distance(ra, rb);
    }
    case VectorMetric::jaccard: {
      // Weighted form for non-negative vectors.
      double lo = 0, hi = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        lo += std::min(a[i], b[i]);
        hi += std::max(a[i], b[i]);
      }
      return hi == 0.0 ? 0.0 : 1.0 - lo / hi;
    }
    case VectorMetric::hamming: {
      std::size_t diff = 0;
      for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
      return static_cast<double>(diff) / static_cast<double>(a.size());
    }
  }
  return 0.0;
}

double compare_sets(std::span<const double> a, std::span<const double> b,
                    const ComparisonSpec& spec, std::size_t width) {
  if (width == 0 || a.size() % width || b.size() % width) {
    throw std::invalid_argument("value count is not a multiple of the width");
  }
  validate_spec(spec, width);
  check_finite_input(a);
  check_finite_input(b);
  const bool ea = a.empty(), eb = b.empty();
  if (ea && eb) return 0.0;
  if ((ea || eb) && spec.empty_value) return *spec.empty_value;

  const std::vector<double> zero_row(width, 0.0);
  switch (spec.mode) {
    case CompareMode::sorted_dtw: {
      std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
      if (sa.empty()) sa = zero_row;
      if (sb.empty()) sb = zero_row;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      return dtw(sa, sb, spec.element, spec.ratio_shift);
    }
    case CompareMode::aggregate_scalar: {
      std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      double s = 0.0;
      for (const auto& [agg, c] : spec.aggregators) {
        if (c != 0.0) s += c * combine(aggregate(sa, agg), aggregate(sb, agg), spec);
      }
      return s;
    }
    case CompareMode::aggregate_vector: {
      if (raw_metric(spec.metric)) {
        std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
        sort_rows(sa, width);
        sort_rows(sb, width);
        return multiset_distance(sa, sb, width, spec.metric);
      }
      const Aggregator agg = spec.aggregators.front().first;
      auto column_aggregate = [&](std::span<const double> v) {
        std::vector<double> rep(width, 0.0), col;
        const std::size_t n = v.size() / width;
        for (std::size_t c = 0; c < width; ++c) {
          col.clear();
          for (std::size_t r = 0; r < n; ++r) col.push_back(v[r * width + c]);
          std::sort(col.begin(), col.end());
          rep[c] = aggregate(col, agg);
        }
        return rep;
      };
      return spec.aggregators.front().second *
             vector_distance(column_aggregate(a), column_aggregate(b), spec.metric);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

namespace {

void check_weights(std::span<const double> w) {
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("weights must be finite and >= 0");
  }
}

}  // namespace

WeightConfig WeightConfig::uniform(std::size_t indicators, int k_star) {
  return full(indicators, k_star,
              std::vector<double>(indicators * static_cast<std::size_t>(k_star + 1), 1.0));
}

WeightConfig WeightConfig::full(std::size_t indicators, int k_star, std::vector<double> w_ik) {
  if (k_star < 0) throw std::invalid_argument("k_star must be >= 0");
  if (w_ik.size() != indicators * static_cast<std::size_t>(k_star + 1)) {
    throw std::invalid_argument("weight matrix has the wrong size");
  }
  check_weights(w_ik);
  WeightConfig w;
  w.k_star_ = k_star;
  w.indicators_ = indicators;
  w.full_ = std::move(w_ik);
  return w;
}

WeightConfig WeightConfig::factored(std::vector<double> hop, std::vector<double> ind) {
  if (hop.empty()) throw std::invalid_argument("hop weights must cover k = 0..k_star");
  check_weights(hop);
  check_weights(ind);
  WeightConfig w;
  w.k_star_ = static_cast<int>(hop.size()) - 1;
  w.indicators_ = ind.size();
  w.factored_ = true;
  w.hop_ = std::move(hop);
  w.ind_ = std::move(ind);
  return w;
}

double WeightConfig::weight(std::size_t i, int k) const {
  if (factored_) return hop_[k] * ind_[i];
  return full_[i * static_cast<std::size_t>(k_star_ + 1) + k];
}

double WeightConfig::hop(int k) const {
  if (!factored_) throw std::logic_error("weights are not in factored form");
  return hop_[k];
}

double WeightConfig::ind(std::size_t i) const {
  if (!factored_) throw std::logic_error("weights are not in factored form");
  return ind_[i];
}

WeightConfig WeightConfig::expanded() const {
  std::vector<double> w;
  for (std::size_t i = 0; i < indicators_; ++i)
    for (int k = 0; k <= k_star_; ++k) w.push_back(weight(i, k));
  return full(indicators_, k_star_, std::move(w));
}

WeightConfig WeightConfig::scaled(double alpha) const {
  WeightConfig w = *this;
  // Scaling one factor scales every product.
  if (factored_) {
    for (double& x : w.hop_) x *= alpha;
  } else {
    for (double& x : w.full_) x *= alpha;
  }
  check_weights(w.factored_ ? w.hop_ : w.full_);
  return w;
}

bool ProximityConfig::uses_shortest_path() const {
  return std::any_of(shortest_path_weights.begin(), shortest_path_weights.end(),
                     [](double w) { return w > 0.0; });
}

bool ProximityConfig::uses_community() const {
  return std::any_of(community_weights.begin(), community_weights.end(),
                     [](double w) { return w > 0.0; });
}

double community_summand(NodeId x, NodeId y, int k, const KHopIndex& hops,
                         std::span<const int> community, CommunityVariant variant) {
  auto ids = [&](NodeId v) {
    std::vector<int> out;
    for (NodeId u : hops.layer(v, k)) out.push_back(community[u]);
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto a = ids(x), b = ids(y);
  if (variant == CommunityVariant::distinct_count_diff) {
    std::vector<int> ua = a, ub = b;
    ua.erase(std::unique(ua.begin(), ua.end()), ua.end());
    ub.erase(std::unique(ub.begin(), ub.end()), ub.end());
    return std::abs(static_cast<double>(ua.size()) - static_cast<double>(ub.size()));
  }
  // Histogram distance by merging the two sorted id lists.
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const int c = (j == b.size() || (i < a.size() && a[i] < b[j])) ? a[i] : b[j];
    double ca = 0, cb = 0;
    while (i < a.size() && a[i] == c) ++ca, ++i;
    while (j < b.size() && b[j] == c) ++cb, ++j;
    s += (ca - cb) * (ca - cb);
  }
  return std::sqrt(s);
}

double shortest_path_summand(NodeId x, NodeId y, int k, const KHopIndex& hops,
                             const DistanceMatrix& dist, Aggregator agg,
                             double unreachable_default) {
  if (!(unreachable_default >= 0.0)) throw std::invalid_argument("unreachable default must be >= 0");
  auto len = [&](NodeId a, NodeId b) {
    const auto d = dist(a, b);
    return d == kUnreachable ? unreachable_default : static_cast<double>(d);
  };
  if (k == 0) return len(x, y);
  std::vector<double> lengths;
  for (NodeId a : hops.layer(x, k))
    for (NodeId b : hops.layer(y, k)) lengths.push_back(len(a, b));
  return aggregate(lengths, agg);
}

// ---------------------------------------------------------------------------

StructuralDistance::StructuralDistance(const Graph& g, std::vector<IndicatorTable> tables,
                                       std::vector<ComparisonSpec> specs, WeightConfig weights,
                                       ProximityConfig proximity)
    : g_(&g),
      tables_(std::move(tables)),
      specs_(std::move(specs)),
      weights_(std::move(weights)),
      proximity_(std::move(proximity)) {
  if (tables_.size() != specs_.size()) {
    throw std::invalid_argument("one comparison spec per indicator is required");
  }
  if (weights_.indicator_count() != tables_.size()) {
    throw std::invalid_argument("weight config does not match the indicator count");
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (tables_[i].node_count() != g.node_count()) {
      throw std::invalid_argument("indicator '" + tables_[i].name + "' has wrong node count");
    }
    validate_spec(specs_[i], tables_[i].width);
    check_finite_input(tables_[i].values);
    for (int k = 0; k <= weights_.k_star(); ++k) any_positive |= weights_.weight(i, k) > 0.0;
  }
  check_weights(proximity_.shortest_path_weights);
  check_weights(proximity_.community_weights);
  any_positive |= proximity_.uses_shortest_path() || proximity_.uses_community();
  if (!any_positive) throw std::invalid_argument("at least one weight must be positive");
  if (proximity_.uses_community()) {
    if (proximity_.community.size() != g.node_count()) {
      throw std::invalid_argument("community assignment does not cover every node");
    }
    for (int c : proximity_.community) {
      if (c < 0) throw std::invalid_argument("node without a community assignment");
    }
  }

  hops_ = KHopIndex(g, weights_.k_star());
  profiles_.reserve(tables_.size());
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    profiles_.emplace_back(tables_[i], specs_[i], hops_);
  }
  if (proximity_.uses_shortest_path()) dist_.emplace(g);
}

double StructuralDistance::term(std::size_t i, NodeId x, NodeId y, int k) const {
  const auto& p = profiles_[i];
  const auto& spec = specs_[i];
  const std::size_t ca = p.count(x, k), cb = p.count(y, k);
  if (ca == 0 && cb == 0) return 0.0;
  if ((ca == 0 || cb == 0) && spec.empty_value) return *spec.empty_value;
  const auto a = p.values(x, k), b = p.values(y, k);
  static const double zero = 0.0;
  switch (spec.mode) {
    case CompareMode::sorted_dtw: {
      const std::span<const double> za = ca ? a : std::span<const double>(&zero, 1);
      const std::span<const double> zb = cb ? b : std::span<const double>(&zero, 1);
      return dtw(za, zb, spec.element, spec.ratio_shift);
    }
    case CompareMode::aggregate_scalar: {
      // Aggregates of an empty layer are stored as 0.
      double s = 0.0;
      for (std::size_t j = 0; j < spec.aggregators.size(); ++j) {
        const double c = spec.aggregators[j].second;
        if (c != 0.0) s += c * combine(a[j], b[j], spec);
      }
      return s;
    }
    case CompareMode::aggregate_vector:
      if (raw_metric(spec.metric)) return multiset_distance(a, b, p.stride(), spec.metric);
      return spec.aggregators.front().second * vector_distance(a, b, spec.metric);
  }
  return 0.0;
}

double StructuralDistance::layer(NodeId x, NodeId y, int k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const double w = weights_.weight(i, k);
    if (w != 0.0) s += w * term(i, x, y, k);
  }
  return s;
}

double StructuralDistance::proximity(NodeId x, NodeId y, int k) const {
  double s = 0.0;
  const auto ku = static_cast<std::size_t>(k);
  if (ku < proximity_.shortest_path_weights.size() && proximity_.shortest_path_weights[ku] > 0) {
    s += proximity_.shortest_path_weights[ku] *
         shortest_path_summand(x, y, k, hops_, *dist_, proximity_.shortest_path_aggregator,
                               proximity_.unreachable_default);
  }
  if (ku < proximity_.community_weights.size() && proximity_.community_weights[ku] > 0) {
    s += proximity_.community_weights[ku] *
         community_summand(x, y, k, hops_, proximity_.community, proximity_.community_variant);
  }
  return s;
}

double StructuralDistance::total(NodeId x, NodeId y) const {
  double s = 0.0;
  for (int k = 0; k <= k_star(); ++k) s += layer(x, y, k) + proximity(x, y, k);
  return s;
}

double StructuralDistance::total_factored(NodeId x, NodeId y) const {
  if (!weights_.is_factored()) {
    throw std::invalid_argument("total_factored needs weights in factored form");
  }
  double s = 0.0;
  for (int k = 0; k <= k_star(); ++k) {
    const double hop = weights_.hop(k);
    if (hop != 0.0) {
      double inner = 0.0;
      for (std::size_t i = 0; i < tables_.size(); ++i) {
        if (weights_.ind(i) != 0.0) inner += weights_.ind(i) * term(i, x, y, k);
      }
      s += hop * inner;
    }
    s += proximity(x, y, k);
  }
  return s;
}

}  // namespace flatstruct
