#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flatstruct/graph.hpp"
#include "flatstruct/indicators.hpp"

namespace flatstruct {

enum class CompareMode { sorted_dtw, aggregate_scalar, aggregate_vector };
enum class ElementDistance { absolute, ratio };
enum class Aggregator { mean, median, sum, min, max, variance, std, iqr };
enum class SetCombiner { difference, quotient };
enum class VectorMetric { euclidean, manhattan, cosine, pearson, spearman, jaccard, hamming };
enum class CommunityVariant { histogram_euclidean, distinct_count_diff };

/// How one indicator's value multisets are compared.
///
/// sorted_dtw:       DTW over the sorted values (scalar indicators).
/// aggregate_scalar: sum_j c_j * combine(agg_j(A), agg_j(B)) over `aggregators`.
/// aggregate_vector: column-wise aggregation to one vector per set, then
///                   `metric`; jaccard and hamming instead compare the raw
///                   multisets of values (rows for vector indicators).
struct ComparisonSpec {
  CompareMode mode = CompareMode::aggregate_scalar;
  ElementDistance element = ElementDistance::absolute;
  // Added to both operands before any ratio, so zero-valued counts are legal.
  double ratio_shift = 1.0;
  std::vector<std::pair<Aggregator, double>> aggregators{{Aggregator::mean, 1.0}};
  SetCombiner combiner = SetCombiner::difference;
  VectorMetric metric = VectorMetric::euclidean;
  // When set: the value returned if exactly one side is empty. When unset the
  // empty side is read as the value 0 (or a zero vector). Empty vs empty is 0.
  std::optional<double> empty_value;
};

/// Throws std::invalid_argument if `spec` cannot be applied to a table of the
/// given width.
void validate_spec(const ComparisonSpec& spec, std::size_t width);

std::string_view to_string(CompareMode m);
std::string_view to_string(ElementDistance d);
std::string_view to_string(Aggregator a);
std::string_view to_string(SetCombiner c);
std::string_view to_string(VectorMetric m);
CompareMode parse_compare_mode(std::string_view s);
ElementDistance parse_element_distance(std::string_view s);
Aggregator parse_aggregator(std::string_view s);
SetCombiner parse_set_combiner(std::string_view s);
VectorMetric parse_vector_metric(std::string_view s);
CommunityVariant parse_community_variant(std::string_view s);

/// max(a,b)/min(a,b) - 1. Throws for non-positive inputs.
double ratio_distance(double a, double b);

/// Full-window DTW over the sequences as given.
double dtw(std::span<const double> a, std::span<const double> b, ElementDistance d,
           double ratio_shift = 0.0);

/// Aggregate of a value list; 0 for an empty list. Variance is the population
/// variance; iqr uses linearly interpolated quartiles.
double aggregate(std::span<const double> values, Aggregator agg);

double vector_distance(std::span<const double> a, std::span<const double> b, VectorMetric m);

/// Compares two raw value multisets. Values are row-major with `width`
/// entries per element. Throws on NaN.
double compare_sets(std::span<const double> a, std::span<const double> b,
                    const ComparisonSpec& spec, std::size_t width = 1);

/// Per-layer weights w_ik, either as a full matrix or factored as
/// w_hop[k] * w_ind[i]. All weights are non-negative.
class WeightConfig {
 public:
  WeightConfig() = default;
  static WeightConfig uniform(std::size_t indicators, int k_star);
  static WeightConfig full(std::size_t indicators, int k_star, std::vector<double> w_ik);
  static WeightConfig factored(std::vector<double> hop, std::vector<double> ind);

  int k_star() const { return k_star_; }
  std::size_t indicator_count() const { return indicators_; }
  bool is_factored() const { return factored_; }
  double weight(std::size_t i, int k) const;
  double hop(int k) const;
  double ind(std::size_t i) const;

  /// Same weights in full form (w_ik = hop * ind for factored configs).
  WeightConfig expanded() const;
  WeightConfig scaled(double alpha) const;

 private:
  int k_star_ = 0;
  std::size_t indicators_ = 0;
  bool factored_ = false;
  std::vector<double> full_;  // indicator-major
  std::vector<double> hop_, ind_;
};

/// Optional proximity summands added to the structural distance. Weight
/// vectors are indexed by k and may be shorter than k_star+1 (missing = 0).
struct ProximityConfig {
  std::vector<double> shortest_path_weights;
  Aggregator shortest_path_aggregator = Aggregator::mean;
  double unreachable_default = 0.0;

  std::vector<double> community_weights;
  CommunityVariant community_variant = CommunityVariant::histogram_euclidean;
  std::vector<int> community;  // per node

  bool uses_shortest_path() const;
  bool uses_community() const;
};

double community_summand(NodeId x, NodeId y, int k, const KHopIndex& hops,
                         std::span<const int> community, CommunityVariant variant);
double shortest_path_summand(NodeId x, NodeId y, int k, const KHopIndex& hops,
                             const DistanceMatrix& dist, Aggregator agg,
                             double unreachable_default);

/// Precomputed I_i(N_k(x)) for one indicator, in the form its spec needs:
/// sorted raw values (rows) for sorted_dtw / jaccard / hamming, otherwise the
/// aggregates only.
class NeighborhoodProfile {
 public:
  NeighborhoodProfile() = default;
  NeighborhoodProfile(const IndicatorTable& table, const ComparisonSpec& spec,
                      const KHopIndex& hops);

  bool raw() const { return raw_; }
  std::size_t stride() const { return stride_; }
  std::size_t count(NodeId x, int k) const { return counts_[slot(x, k)]; }
  /// Sorted raw values, or the aggregate vector, depending on raw().
  std::span<const double> values(NodeId x, int k) const {
    const std::size_t s = slot(x, k);
    return {data_.data() + offsets_[s], data_.data() + offsets_[s + 1]};
  }
  /// Mean of the layer's values (L1 norm of the column means for vector
  /// indicators). Used to order candidate lists.
  double key(NodeId x, int k) const { return keys_[slot(x, k)]; }

 private:
  std::size_t slot(NodeId x, int k) const {
    return static_cast<std::size_t>(x) * (k_star_ + 1) + k;
  }
  bool raw_ = false;
  int k_star_ = 0;
  std::size_t stride_ = 1;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> counts_;
  std::vector<double> data_;
  std::vector<double> keys_;
};

/// The weighted structural dissimilarity between node pairs: 0 means the
/// compared neighborhoods look identical under every configured indicator.
class StructuralDistance {
 public:
  StructuralDistance(const Graph& g, std::vector<IndicatorTable> tables,
                     std::vector<ComparisonSpec> specs, WeightConfig weights,
                     ProximityConfig proximity = {});

  const Graph& graph() const { return *g_; }
  const KHopIndex& hops() const { return hops_; }
  int k_star() const { return weights_.k_star(); }
  std::size_t indicator_count() const { return tables_.size(); }
  const IndicatorTable& table(std::size_t i) const { return tables_[i]; }
  const ComparisonSpec& spec(std::size_t i) const { return specs_[i]; }
  const NeighborhoodProfile& profile(std::size_t i) const { return profiles_[i]; }
  const WeightConfig& weights() const { return weights_; }

  /// f_i(I_i(N_k(x)), I_i(N_k(y))), unweighted.
  double term(std::size_t i, NodeId x, NodeId y, int k) const;
  /// sum_i w_ik * f_i at layer k (indicator part only).
  double layer(NodeId x, NodeId y, int k) const;
  /// Weighted proximity summands at layer k.
  double proximity(NodeId x, NodeId y, int k) const;
  /// sum_k layer + proximity.
  double total(NodeId x, NodeId y) const;
  /// sum_k w_hop_k sum_i w_ind_i f_i; requires factored weights.
  double total_factored(NodeId x, NodeId y) const;

 private:
  const Graph* g_;
  KHopIndex hops_;
  std::vector<IndicatorTable> tables_;
  std::vector<ComparisonSpec> specs_;
  WeightConfig weights_;
  ProximityConfig proximity_;
  std::vector<NeighborhoodProfile> profiles_;
  std::optional<DistanceMatrix> dist_;
};

}  // namespace flatstruct
