#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flatstruct/config.hpp"
#include "flatstruct/optimize.hpp"
#include "flatstruct/tasks.hpp"

namespace flatstruct {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct EmbedReport {
  std::vector<StageTiming> timings;
  BuildStats simgraph_stats;
  std::uint64_t dense_pairs = 0;  // n(n-1)/2, for comparison with the evaluations
  std::size_t simgraph_edges = 0;
  std::vector<double> epoch_loss;
};
void write_embed_report(const EmbedReport& r, std::ostream& out);

/// Indicator tables in config order, standardized where requested. Walk-based
/// indicators draw from a stream derived from cfg.seed.
std::vector<IndicatorTable> compute_indicators(const Graph& g, const PipelineConfig& cfg);

SimilarityGraph build_similarity_graph(const Graph& g, std::vector<IndicatorTable> tables,
                                       const PipelineConfig& cfg, BuildStats* stats = nullptr);

struct EmbedResult {
  EmbeddingMatrix embedding;
  EmbedReport report;
  std::optional<SimilarityGraph> simgraph;  // only when asked to keep it
};

/// Everything after the indicators: similarity graph, walks, skip-gram.
EmbedResult embed_from_tables(const Graph& g, std::vector<IndicatorTable> tables,
                              const PipelineConfig& cfg, bool keep_simgraph = false);
EmbedResult embed(const Graph& g, const PipelineConfig& cfg);

/// Proximity baseline: uniform walks on g itself, same walk and skip-gram
/// settings.
EmbeddingMatrix embed_uniform_baseline(const Graph& g, const PipelineConfig& cfg);

/// Search space over the weights of `cfg`: w.<indicator>.<k> for full or
/// uniform configs, w_hop.<k> and w_ind.<indicator> for factored ones, each in
/// [0, 1].
SearchSpace weight_search_space(const PipelineConfig& cfg);
/// `cfg` with the assignment's weights written in (uniform becomes full).
PipelineConfig apply_assignment(const PipelineConfig& cfg, const SearchSpace& space,
                                const std::vector<double>& values);

struct OptimizeJob {
  int trials = 200;
  double holdout_frac = 0.2;  // kept out of the objective entirely
  int folds = 5;
  std::size_t subgraph_nodes = 0;  // > 0: optimize on a uniform induced subgraph
  bool random = false;             // random search instead of TPE
  TpeOptions tpe;                  // trials/seed overwritten from the job/config
};

struct OptimizeOutcome {
  OptimizeResult result;
  SearchSpace space;
  PipelineConfig best_config;
  std::vector<std::size_t> train_rows, holdout_rows;  // rows of the optimized graph
  std::optional<double> holdout_accuracy;  // best config, full graph, trained on train rows
};

/// Maximizes cross-validated accuracy on the training rows over the weight
/// space. Trials already in `prior` are not re-run.
OptimizeOutcome optimize_weights(const Graph& g, const NodeLabels& labels,
                                 const PipelineConfig& cfg, const OptimizeJob& job,
                                 std::vector<TrialRecord> prior = {},
                                 const TrialCallback& on_trial = {});

}  // namespace flatstruct
