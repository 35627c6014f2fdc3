// flatstruct: generate graphs, embed them, optimize weights, evaluate.
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "flatstruct/generators.hpp"
#include "flatstruct/pipeline.hpp"

using namespace flatstruct;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string kind, out;
  int clique = 10, path = 10;
  std::size_t n = 1000, links = 2;
  double avg_degree = 5.0;
  std::uint64_t seed = 1;
};

int run_generate(const GenerateArgs& a) {
  Graph g;
  if (a.kind == "karate") g = karate_club();
  else if (a.kind == "karate-mirrored") g = generate_mirrored_karate();
  else if (a.kind == "barbell") g = generate_barbell(a.clique, a.path);
  else if (a.kind == "er") g = erdos_renyi(a.n, a.avg_degree, a.seed);
  else if (a.kind == "pa") g = preferential_attachment(a.n, a.links, a.seed);
  else throw UsageError("unknown graph kind '" + a.kind + "'");
  auto out = open_out(a.out);
  write_edge_list(g, out);
  std::cerr << a.kind << ": " << g.node_count() << " nodes, " << g.edge_count() << " edges -> "
            << a.out << '\n';
  return 0;
}

// ---- shared config handling ------------------------------------------------

struct ConfigArgs {
  std::string config;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;
  std::string simgraph;
  std::optional<double> c;
  std::optional<int> dim;
};

void add_config_options(CLI::App* app, ConfigArgs& a) {
  app->add_option("--config", a.config, "key = value config file")->check(CLI::ExistingFile);
  app->add_option("--set", a.overrides, "override one config key (key=value), repeatable");
  app->add_option("--seed", a.seed, "global seed (overrides the config)");
  app->add_option("--simgraph", a.simgraph, "similarity graph construction")
      ->check(CLI::IsMember({"dense", "pruned"}));
  app->add_option("--c", a.c, "candidate budget constant for --simgraph pruned")
      ->check(CLI::PositiveNumber);
  app->add_option("--dim", a.dim, "embedding dimension (overrides skipgram.dim)")
      ->check(CLI::PositiveNumber);
}

PipelineConfig resolve_config(const ConfigArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  std::vector<std::string> problems;
  auto set = [&](const std::string& key, const std::string& value) {
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  };
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      problems.push_back("--set " + kv + ": expected key=value");
      continue;
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  if (a.seed) cfg.seed = *a.seed;
  if (!a.simgraph.empty()) set("simgraph.mode", a.simgraph);
  if (a.c) set("simgraph.c", fmt("%.17g", *a.c));
  if (a.dim) cfg.skipgram.dim = *a.dim;
  if (!problems.empty()) throw ConfigError(problems);
  validate_config(cfg);
  return cfg;
}

Graph load_graph(const std::string& path) {
  const auto file = load_edge_list(path);
  if (file.cleanup.duplicate_edges || file.cleanup.self_loops) {
    std::cerr << path << ": dropped " << file.cleanup.duplicate_edges << " duplicate edges and "
              << file.cleanup.self_loops << " self-loops\n";
  }
  return file.graph;
}

// ---- embed -------------------------------------------------------------------

struct EmbedArgs {
  std::string edges, out, dump_indicators, dump_simgraph, dump_config;
  bool baseline = false;
  ConfigArgs cfg;
};

int run_embed(const EmbedArgs& a) {
  const PipelineConfig cfg = resolve_config(a.cfg);
  const Graph g = load_graph(a.edges);
  if (a.baseline) {
    save_embeddings(g, embed_uniform_baseline(g, cfg), a.out);
    std::cerr << "uniform-walk baseline: " << g.node_count() << " x " << cfg.skipgram.dim << " -> " << a.out << '\n';
    return 0;
  }
  const auto start = std::chrono::steady_clock::now();
  auto tables = compute_indicators(g, cfg);
  const double t_ind = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.dump_indicators.empty()) {
    auto out = open_out(a.dump_indicators);
    write_indicator_tsv(g, tables, out);
  }
  auto res = embed_from_tables(g, std::move(tables), cfg, !a.dump_simgraph.empty());
  res.report.timings.insert(res.report.timings.begin(), {"indicators", t_ind});
  if (res.simgraph) {
    auto out = open_out(a.dump_simgraph);
    write_simgraph(g, *res.simgraph, out);
  }
  if (!a.dump_config.empty()) save_config(cfg, a.dump_config);
  save_embeddings(g, res.embedding, a.out);
  write_embed_report(res.report, std::cerr);
  std::cerr << "embedding: " << g.node_count() << " x " << res.embedding.dim << " -> " << a.out << '\n';
  return 0;
}

// ---- optimize ----------------------------------------------------------------

struct OptimizeArgs {
  std::string edges, labels, out;
  int trials = 200;
  double holdout = 0.2;
  std::size_t subgraph = 0;
  bool random = false;
  ConfigArgs cfg;
};

int run_optimize(const OptimizeArgs& a) {
  const PipelineConfig cfg = resolve_config(a.cfg);
  const Graph g = load_graph(a.edges);
  const NodeLabels labels = load_labels(a.labels, g.labels());
  OptimizeJob job;
  job.trials = a.trials;
  job.holdout_frac = a.holdout;
  job.subgraph_nodes = a.subgraph;
  job.random = a.random;

  const SearchSpace space = weight_search_space(cfg);
  const std::string log_path = a.out + ".trials";
  std::vector<TrialRecord> prior;
  if (std::filesystem::exists(log_path)) {
    std::ifstream in(log_path);
    prior = read_trial_log(in, space);
    std::cerr << "resuming from " << log_path << " at trial " << prior.size() + 1 << '\n';
  }
  std::ofstream log(log_path, std::ios::app);
  if (!log) throw std::runtime_error("cannot write " + log_path);
  const auto outcome = optimize_weights(g, labels, cfg, job, prior, [&](const TrialRecord& r) {
    write_trial_record(log, space, r);
    log.flush();
    std::cerr << "trial " << r.index + 1 << '/' << a.trials << ": "
              << (r.failed ? "failed (" + r.error + ")" : fmt("%.4f", r.objective))
              << fmt(" [%.2fs]", r.seconds) << '\n';
  });

  save_config(outcome.best_config, a.out + ".conf");
  auto report = open_out(a.out + ".report");
  const auto& best = outcome.result.best_trial();
  report << "best trial: " << best.index + 1 << " of " << outcome.result.history.size() << '\n';
  report << "cv accuracy (training rows): " << fmt("%.4f", best.objective) << '\n';
  if (outcome.holdout_accuracy) {
    report << "holdout accuracy (" << outcome.holdout_rows.size()
           << " rows): " << fmt("%.4f", *outcome.holdout_accuracy) << '\n';
  }
  report << '\n' << weight_report(outcome.best_config.weights(), outcome.best_config.indicator_names());
  report << "\nbest_objective=" << fmt("%.17g", best.objective) << '\n';
  if (outcome.holdout_accuracy) report << "holdout_accuracy=" << fmt("%.17g", *outcome.holdout_accuracy) << '\n';
  std::cerr << "best config -> " << a.out << ".conf, report -> " << a.out << ".report\n";
  return 0;
}

// ---- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string embeddings, labels;
  int repeats = 10;
  double train_frac = 0.8;
  std::uint64_t seed = 1;
  int kmeans_k = 0, kmeans_restarts = 10;
  int anomaly_top = 0, knn = 5;
  std::vector<std::string> neighbors;
  std::size_t neighbor_count = 5;
};

int run_eval(const EvalArgs& a) {
  const auto loaded = load_embeddings(a.embeddings);
  const Features x = features_of(loaded.matrix);
  const auto& names = loaded.labels;
  std::ostringstream kv;  // machine-readable lines, printed last
  std::ostream& out = std::cout;
  if (!a.labels.empty()) {
    const NodeLabels labels = load_labels(a.labels, names);
    const auto r = classify_eval(x, labels, a.train_frac, a.repeats, a.seed);
    out << "classification: " << labels.class_count() << " classes, " << a.repeats
        << " stratified splits, train fraction " << fmt("%g", a.train_frac) << '\n';
    out << "  run  accuracy\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      out << fmt("  %3.0f", static_cast<double>(i + 1)) << fmt("  %8.4f\n", r.runs[i]);
      kv << "accuracy.run." << i + 1 << '=' << fmt("%.17g", r.runs[i]) << '\n';
    }
    out << "  mean " << fmt("%8.4f", r.mean) << "\n\n";
    kv << "accuracy.mean=" << fmt("%.17g", r.mean) << '\n';
  }
  if (a.kmeans_k > 0) {
    const auto km = kmeans(x, a.kmeans_k, a.kmeans_restarts, a.seed);
    out << "k-means: k=" << a.kmeans_k << ", inertia " << fmt("%.6g", km.inertia) << '\n';
    for (int c = 0; c < a.kmeans_k; ++c) {
      out << "  cluster " << c << ':';
      for (std::size_t v = 0; v < names.size(); ++v)
        if (km.assignment[v] == c) out << ' ' << names[v];
      out << '\n';
    }
    out << '\n';
    kv << "kmeans.inertia=" << fmt("%.17g", km.inertia) << '\n';
    for (std::size_t v = 0; v < names.size(); ++v) kv << "kmeans.node." << names[v] << '=' << km.assignment[v] << '\n';
  }
  if (a.anomaly_top > 0) {
    const auto an = anomaly_scores(x, a.knn);
    const auto top = std::min<std::size_t>(a.anomaly_top, names.size());
    out << "anomaly ranking (mean distance to " << a.knn << " nearest, min-max scaled), top " << top << '\n';
    out << "  rank  node      score\n";
    for (std::size_t r = 0; r < top; ++r) {
      const NodeId v = an.ranking[r];
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %4zu  %-8s %6.4f\n", r + 1, names[v].c_str(), an.score[v]);
      out << buf;
      kv << "anomaly.rank." << r + 1 << '=' << names[v] << '\n';
    }
    out << '\n';
  }
  for (const auto& label : a.neighbors) {
    const auto it = std::find(names.begin(), names.end(), label);
    if (it == names.end()) throw std::invalid_argument("unknown node '" + label + "'");
    const auto nn = nearest_neighbors(x, static_cast<NodeId>(it - names.begin()),
                                      std::min(a.neighbor_count, names.size() - 1));
    out << "nearest to " << label << ':';
    for (NodeId v : nn) out << ' ' << names[v];
    out << '\n';
    kv << "neighbors." << label << '=';
    for (std::size_t i = 0; i < nn.size(); ++i) kv << (i ? "," : "") << names[nn[i]];
    kv << '\n';
  }
  out << kv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatstruct: structural node embeddings from flattened neighborhood indicators"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap on OpenMP threads (1 = fully reproducible)")
      ->check(CLI::NonNegativeNumber);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a synthetic graph as an edge list");
  g->add_option("kind", gen.kind, "karate | karate-mirrored | barbell | er | pa")
      ->required()
      ->check(CLI::IsMember({"karate", "karate-mirrored", "barbell", "er", "pa"}));
  g->add_option("-o,--out", gen.out, "output edge-list path")->required();
  g->add_option("--clique", gen.clique, "barbell clique size")->check(CLI::PositiveNumber);
  g->add_option("--path", gen.path, "barbell path length")->check(CLI::NonNegativeNumber);
  g->add_option("--n", gen.n, "node count (er, pa)")->check(CLI::PositiveNumber);
  g->add_option("--avg-degree", gen.avg_degree, "expected degree (er)")->check(CLI::NonNegativeNumber);
  g->add_option("--links", gen.links, "edges per new node (pa)")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "generator seed");

  EmbedArgs emb;
  auto* e = app.add_subcommand("embed", "run the embedding pipeline on an edge list");
  e->add_option("edges", emb.edges, "edge-list file")->required()->check(CLI::ExistingFile);
  e->add_option("-o,--out", emb.out, "output embedding file")->required();
  e->add_option("--dump-indicators", emb.dump_indicators, "write indicator values (TSV)");
  e->add_option("--dump-simgraph", emb.dump_simgraph, "write the weighted similarity graph");
  e->add_option("--dump-config", emb.dump_config, "write the effective config");
  e->add_flag("--baseline-uniform", emb.baseline, "uniform walks on the input graph instead");
  add_config_options(e, emb.cfg);

  OptimizeArgs opt;
  auto* o = app.add_subcommand("optimize", "tune indicator/hop weights for node classification");
  o->add_option("edges", opt.edges, "edge-list file")->required()->check(CLI::ExistingFile);
  o->add_option("labels", opt.labels, "label file (node class)")->required()->check(CLI::ExistingFile);
  o->add_option("-o,--out", opt.out, "output prefix: .conf, .trials, .report")->required();
  o->add_option("--trials", opt.trials, "trial budget (including resumed trials)")->check(CLI::PositiveNumber);
  o->add_option("--holdout-frac", opt.holdout, "fraction held out from the objective")->check(CLI::Range(0.0, 0.95));
  o->add_option("--optimize-on-subgraph", opt.subgraph, "optimize on a uniform induced subgraph of N nodes");
  o->add_flag("--random-search", opt.random, "random search instead of TPE");
  add_config_options(o, opt.cfg);

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "classification, clustering and anomaly reports");
  v->add_option("embeddings", ev.embeddings, "embedding file")->required()->check(CLI::ExistingFile);
  v->add_option("labels", ev.labels, "label file; omit to skip classification")->check(CLI::ExistingFile);
  v->add_option("--repeats", ev.repeats, "classification repeats")->check(CLI::PositiveNumber);
  v->add_option("--train-frac", ev.train_frac, "training fraction per split")->check(CLI::Range(0.01, 0.99));
  v->add_option("--seed", ev.seed, "seed for splits and k-means");
  v->add_option("--kmeans", ev.kmeans_k, "k-means with K clusters")->check(CLI::NonNegativeNumber);
  v->add_option("--kmeans-restarts", ev.kmeans_restarts, "k-means restarts")->check(CLI::PositiveNumber);
  v->add_option("--anomaly-top", ev.anomaly_top, "print the N most anomalous nodes")->check(CLI::NonNegativeNumber);
  v->add_option("--knn", ev.knn, "neighbors for the anomaly score")->check(CLI::PositiveNumber);
  v->add_option("--neighbors", ev.neighbors, "print nearest neighbors of these nodes");
  v->add_option("--neighbor-count", ev.neighbor_count, "how many neighbors")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) set_thread_count(threads);

  try {
    if (*g) return run_generate(gen);
    if (*e) return run_embed(emb);
    if (*o) return run_optimize(opt);
    if (*v) return run_eval(ev);
  } catch (const ConfigError& err) {
    std::cerr << "flatstruct: " << err.what() << '\n';
    return 2;
  } catch (const UsageError& err) {
    std::cerr << "flatstruct: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "flatstruct: " << err.what() << '\n';
    return 1;
  }
  return 2;
}
