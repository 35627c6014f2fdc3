#include "flatstruct/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace flatstruct {

namespace {

// Independent streams for the stochastic stages.
enum : std::uint64_t { kIndicatorStream = 1, kWalkStream = 2, kSkipGramStream = 3, kSplitStream = 4, kSubgraphStream = 5 };

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

SkipGramOptions skipgram_options(const PipelineConfig& cfg) {
  SkipGramOptions o = cfg.skipgram;
  o.seed = derive_seed(cfg.seed, kSkipGramStream);
  return o;
}

}  // namespace

void write_embed_report(const EmbedReport& r, std::ostream& out) {
  char buf[128];
  out << "stage        seconds\n";
  double total = 0.0;
  for (const auto& t : r.timings) {
    std::snprintf(buf, sizeof buf, "%-12s %8.3f\n", t.stage.c_str(), t.seconds);
    out << buf;
    total += t.seconds;
  }
  std::snprintf(buf, sizeof buf, "%-12s %8.3f\n", "total", total);
  out << buf;
  out << "pair evaluations: " << r.simgraph_stats.evaluations << " of " << r.dense_pairs
      << " dense pairs";
  if (r.simgraph_stats.window) {
    out << " (" << r.simgraph_stats.lists << " sorted lists, window " << r.simgraph_stats.window << ")";
  }
  out << "\nsimilarity edges: " << r.simgraph_edges << '\n';
  out << "epoch loss:";
  for (double l : r.epoch_loss) {
    std::snprintf(buf, sizeof buf, " %.4f", l);
    out << buf;
  }
  out << '\n';
}

std::vector<IndicatorTable> compute_indicators(const Graph& g, const PipelineConfig& cfg) {
  IndicatorOptions opts = cfg.indicator_options;
  std::vector<IndicatorTable> tables;
  for (std::size_t i = 0; i < cfg.indicators.size(); ++i) {
    opts.seed = derive_seed(cfg.seed, kIndicatorStream, i);
    tables.push_back(compute_indicator(g, cfg.indicators[i].kind, opts));
    if (cfg.indicators[i].standardize) standardize(tables.back());
  }
  return tables;
}

SimilarityGraph build_similarity_graph(const Graph& g, std::vector<IndicatorTable> tables,
                                       const PipelineConfig& cfg, BuildStats* stats) {
  std::vector<ComparisonSpec> specs;
  for (const auto& s : cfg.indicators) specs.push_back(s.spec);
  const StructuralDistance sd(g, std::move(tables), std::move(specs), cfg.weights());
  return cfg.simgraph == BuildMode::dense ? build_dense(sd, cfg.transform, kDenseNodeCap, stats)
                                          : build_pruned(sd, cfg.transform, cfg.candidate_c, stats);
}

EmbedResult embed_from_tables(const Graph& g, std::vector<IndicatorTable> tables,
                              const PipelineConfig& cfg, bool keep_simgraph) {
  validate_config(cfg);
  EmbedResult out;
  Stopwatch clock;
  auto sg = build_similarity_graph(g, std::move(tables), cfg, &out.report.simgraph_stats);
  out.report.timings.push_back({"simgraph", clock.lap()});
  const auto corpus = biased_walks(sg, cfg.walks_per_node, cfg.walk_len, derive_seed(cfg.seed, kWalkStream));
  out.report.timings.push_back({"walks", clock.lap()});
  out.embedding = skipgram_train(corpus, g.node_count(), skipgram_options(cfg));
  out.report.timings.push_back({"skipgram", clock.lap()});
  const std::uint64_t n = g.node_count();
  out.report.dense_pairs = n * (n ? n - 1 : 0) / 2;
  out.report.simgraph_edges = sg.edge_count();
  out.report.epoch_loss = out.embedding.epoch_loss;
  if (keep_simgraph) out.simgraph.emplace(std::move(sg));
  return out;
}

EmbedResult embed(const Graph& g, const PipelineConfig& cfg) {
  validate_config(cfg);
  Stopwatch clock;
  auto tables = compute_indicators(g, cfg);
  const double t = clock.lap();
  auto out = embed_from_tables(g, std::move(tables), cfg);
  out.report.timings.insert(out.report.timings.begin(), {"indicators", t});
  return out;
}

EmbeddingMatrix embed_uniform_baseline(const Graph& g, const PipelineConfig& cfg) {
  validate_config(cfg);
  const auto corpus = uniform_walks(g, cfg.walks_per_node, cfg.walk_len, derive_seed(cfg.seed, kWalkStream));
  return skipgram_train(corpus, g.node_count(), skipgram_options(cfg));
}

SearchSpace weight_search_space(const PipelineConfig& cfg) {
  SearchSpace space;
  const auto names = cfg.indicator_names();
  if (cfg.weight_mode == WeightMode::factored) {
    for (int k = 0; k <= cfg.k_star; ++k) space.add_continuous("w_hop." + std::to_string(k), 0.0, 1.0);
    for (const auto& n : names) space.add_continuous("w_ind." + n, 0.0, 1.0);
  } else {
    for (const auto& n : names)
      for (int k = 0; k <= cfg.k_star; ++k) space.add_continuous("w." + n + "." + std::to_string(k), 0.0, 1.0);
  }
  return space;
}

PipelineConfig apply_assignment(const PipelineConfig& cfg, const SearchSpace& space,
                                const std::vector<double>& values) {
  PipelineConfig out = cfg;
  if (out.weight_mode == WeightMode::uniform) set_config_value(out, "weights.mode", "full");
  for (std::size_t i = 0; i < space.size(); ++i)
    set_config_value(out, space.params()[i].name, space.format(i, values[i]));
  return out;
}

OptimizeOutcome optimize_weights(const Graph& g, const NodeLabels& labels,
                                 const PipelineConfig& cfg, const OptimizeJob& job,
                                 std::vector<TrialRecord> prior, const TrialCallback& on_trial) {
  validate_config(cfg);
  if (labels.cls.size() != g.node_count()) throw std::invalid_argument("labels do not cover the graph");
  if (!(job.holdout_frac >= 0.0 && job.holdout_frac < 1.0)) {
    throw std::invalid_argument("holdout fraction must lie in [0, 1)");
  }
  OptimizeOutcome out;
  out.space = weight_search_space(cfg);
  if (job.holdout_frac > 0.0) {
    auto split = stratified_split(labels.cls, labels.class_count(), 1.0 - job.holdout_frac,
                                  derive_seed(cfg.seed, kSplitStream));
    out.train_rows = std::move(split.train);
    out.holdout_rows = std::move(split.test);
  } else {
    out.train_rows.resize(g.node_count());
    std::iota(out.train_rows.begin(), out.train_rows.end(), std::size_t{0});
  }

  // The objective graph: g itself, or a uniform induced subgraph of the
  // training rows.
  Graph sub;
  const Graph* opt_g = &g;
  NodeLabels opt_labels = labels;
  std::vector<std::size_t> opt_rows = out.train_rows;
  if (job.subgraph_nodes > 0 && job.subgraph_nodes < out.train_rows.size()) {
    const auto pick = sample_nodes(out.train_rows.size(), job.subgraph_nodes, derive_seed(cfg.seed, kSubgraphStream));
    std::vector<NodeId> nodes;
    opt_labels.cls.clear();
    for (NodeId p : pick) {
      nodes.push_back(static_cast<NodeId>(out.train_rows[p]));
      opt_labels.cls.push_back(labels.cls[out.train_rows[p]]);
    }
    sub = induced_subgraph(g, nodes);
    opt_g = &sub;
    opt_rows.resize(nodes.size());
    std::iota(opt_rows.begin(), opt_rows.end(), std::size_t{0});
  }

  const auto tables = compute_indicators(*opt_g, cfg);
  // Every trial reuses cfg.seed for walks, training and folds, so trials
  // differ only in their weights.
  const TrialObjective objective = [&](const std::vector<double>& values, std::uint64_t) {
    const auto trial_cfg = apply_assignment(cfg, out.space, values);
    const auto emb = embed_from_tables(*opt_g, tables, trial_cfg).embedding;
    return cross_validated_accuracy(features_of(emb), opt_labels, opt_rows, job.folds,
                                    derive_seed(cfg.seed, kSplitStream, 1));
  };
  if (job.random) {
    out.result = random_search(out.space, objective, job.trials, cfg.seed, std::move(prior), on_trial);
  } else {
    TpeOptions tpe = job.tpe;
    tpe.trials = job.trials;
    tpe.seed = cfg.seed;
    tpe.startup_trials = std::min(tpe.startup_trials, job.trials);
    out.result = tpe_optimize(out.space, objective, tpe, std::move(prior), on_trial);
  }
  out.best_config = apply_assignment(cfg, out.space, out.result.best_trial().values);

  if (!out.holdout_rows.empty()) {
    const auto x = features_of(embed(g, out.best_config).embedding);
    const OneVsRestClassifier clf(x, labels.cls, labels.class_count(), out.train_rows);
    out.holdout_accuracy = clf.accuracy(x, labels.cls, out.holdout_rows);
  }
  return out;
}

}  // namespace flatstruct
