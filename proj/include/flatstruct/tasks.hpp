#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flatstruct/graph.hpp"
#include "flatstruct/skipgram.hpp"

namespace flatstruct {

/// Per-node class labels. Internally classes are 0..C-1; `class_names` keeps
/// the ids as written in the label file, in ascending numeric order.
struct NodeLabels {
  std::vector<int> cls;
  std::vector<std::string> class_names;
  int class_count() const { return static_cast<int>(class_names.size()); }
};

/// "node_label class_id" per line; '#' comments and a leading non-numeric
/// header line are skipped. Every node of `nodes` must be labelled, and every
/// labelled node must exist (the error names the first unknown one).
NodeLabels read_labels(std::istream& in, const std::vector<std::string>& nodes);
NodeLabels load_labels(const std::string& path, const std::vector<std::string>& nodes);

/// Row-major feature matrix, one row per node.
struct Features {
  std::size_t dim = 0;
  std::vector<double> values;
  std::size_t rows() const { return dim ? values.size() / dim : 0; }
  const double* row(std::size_t i) const { return values.data() + i * dim; }
};
Features features_of(const EmbeddingMatrix& emb);

struct LogisticOptions {
  int iterations = 300;
  double lr = 0.5;
  double l2 = 1e-3;
};

/// One-vs-rest logistic regression, full-batch gradient descent on
/// standardized features (standardization fitted on the training rows).
class OneVsRestClassifier {
 public:
  OneVsRestClassifier(const Features& x, const std::vector<int>& y, int class_count,
                      const std::vector<std::size_t>& train, const LogisticOptions& opts = {});
  int predict(const double* row) const;
  double accuracy(const Features& x, const std::vector<int>& y,
                  const std::vector<std::size_t>& rows) const;

 private:
  std::size_t dim_;
  int classes_;
  std::vector<double> mean_, scale_;
  std::vector<double> w_;  // classes x (dim + 1), bias last
};

struct Split {
  std::vector<std::size_t> train, test;
};
/// Per class: shuffle, then round(train_frac * size) rows to train, clamped so
/// a class with >= 2 members lands on both sides.
Split stratified_split(const std::vector<int>& y, int class_count, double train_frac,
                       std::uint64_t seed);

struct ClassifyResult {
  double mean = 0.0;
  std::vector<double> runs;
};
ClassifyResult classify_eval(const Features& x, const NodeLabels& labels, double train_frac,
                             int repeats, std::uint64_t seed, const LogisticOptions& opts = {});

/// Mean accuracy of `folds`-fold stratified cross-validation restricted to
/// `rows`; used as the optimization objective so test rows never leak.
double cross_validated_accuracy(const Features& x, const NodeLabels& labels,
                                const std::vector<std::size_t>& rows, int folds,
                                std::uint64_t seed, const LogisticOptions& opts = {});

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = 0.0;
  std::vector<double> inertia_history;  // of the winning restart, one per Lloyd iteration
};
/// Lloyd's algorithm with k-means++ seeding; the lowest-inertia restart wins.
KMeansResult kmeans(const Features& x, int k, int restarts, std::uint64_t seed,
                    int max_iterations = 300);

struct AnomalyResult {
  std::vector<double> score;    // in [0, 1]
  std::vector<NodeId> ranking;  // descending score, ties by id
};
/// Mean distance to the k nearest other points, min-max normalized.
AnomalyResult anomaly_scores(const Features& x, int k_neighbors);
AnomalyResult anomaly_scores_serial(const Features& x, int k_neighbors);

/// The m nearest other nodes, ascending distance, ties by id.
std::vector<NodeId> nearest_neighbors(const Features& x, NodeId node, std::size_t m);

}  // namespace flatstruct
