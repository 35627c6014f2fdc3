#include "flatstruct/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace flatstruct {

NodeLabels read_labels(std::istream& in, const std::vector<std::string>& nodes) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);

  std::vector<long long> raw(nodes.size());
  std::vector<bool> seen(nodes.size(), false);
  std::string line;
  std::size_t line_no = 0;
  bool any_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string node, cls, extra;
    if (!(ls >> node)) continue;
    const std::string where = "label line " + std::to_string(line_no) + ": ";
    if (!(ls >> cls) || (ls >> extra)) throw ParseError(where + "expected \"<node> <class>\"");
    long long c = 0;
    std::size_t used = 0;
    try {
      c = std::stoll(cls, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cls.size()) {
      if (!any_data) {  // header such as "node label"
        any_data = true;
        continue;
      }
      throw ParseError(where + "class '" + cls + "' is not an integer");
    }
    any_data = true;
    const auto it = index.find(node);
    if (it == index.end()) throw ParseError(where + "unknown node '" + node + "'");
    if (seen[it->second]) throw ParseError(where + "node '" + node + "' labelled twice");
    seen[it->second] = true;
    raw[it->second] = c;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!seen[i]) throw ParseError("label file has no class for node '" + nodes[i] + "'");
  }
  std::map<long long, int> dense;
  for (long long c : raw) dense.emplace(c, 0);
  NodeLabels out;
  for (auto& [c, id] : dense) {
    id = static_cast<int>(out.class_names.size());
    out.class_names.push_back(std::to_string(c));
  }
  out.cls.reserve(raw.size());
  for (long long c : raw) out.cls.push_back(dense[c]);
  return out;
}

NodeLabels load_labels(const std::string& path, const std::vector<std::string>& nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read label file " + path);
  return read_labels(in, nodes);
}

Features features_of(const EmbeddingMatrix& emb) { return Features{emb.dim, emb.values}; }

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

void shuffle(std::vector<std::size_t>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::vector<std::vector<std::size_t>> rows_by_class(const std::vector<int>& y,
                                                    const std::vector<std::size_t>& rows,
                                                    int class_count) {
  std::vector<std::vector<std::size_t>> by(class_count);
  for (std::size_t r : rows) by[y[r]].push_back(r);
  return by;
}

}  // namespace

OneVsRestClassifier::OneVsRestClassifier(const Features& x, const std::vector<int>& y,
                                         int class_count, const std::vector<std::size_t>& train,
                                         const LogisticOptions& opts)
    : dim_(x.dim), classes_(class_count) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  if (class_count < 1) throw std::invalid_argument("need at least one class");
  const std::size_t d = dim_, m = train.size();
  mean_.assign(d, 0.0);
  scale_.assign(d, 1.0);
  for (std::size_t r : train)
    for (std::size_t i = 0; i < d; ++i) mean_[i] += x.row(r)[i];
  for (double& v : mean_) v /= static_cast<double>(m);
  std::vector<double> var(d, 0.0);
  for (std::size_t r : train)
    for (std::size_t i = 0; i < d; ++i) var[i] += std::pow(x.row(r)[i] - mean_[i], 2);
  for (std::size_t i = 0; i < d; ++i) {
    const double sd = std::sqrt(var[i] / static_cast<double>(m));
    scale_[i] = sd > 1e-12 ? 1.0 / sd : 0.0;
  }
  std::vector<double> z(m * d);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 0; i < d; ++i)
      z[a * d + i] = (x.row(train[a])[i] - mean_[i]) * scale_[i];

  w_.assign(static_cast<std::size_t>(classes_) * (d + 1), 0.0);
  std::vector<double> grad(d + 1);
  for (int c = 0; c < classes_; ++c) {
    double* w = &w_[static_cast<std::size_t>(c) * (d + 1)];
    for (int it = 0; it < opts.iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t a = 0; a < m; ++a) {
        const double* za = &z[a * d];
        double s = w[d];
        for (std::size_t i = 0; i < d; ++i) s += w[i] * za[i];
        const double g = sigmoid(s) - (y[train[a]] == c ? 1.0 : 0.0);
        for (std::size_t i = 0; i < d; ++i) grad[i] += g * za[i];
        grad[d] += g;
      }
      for (std::size_t i = 0; i < d; ++i)
        w[i] -= opts.lr * (grad[i] / static_cast<double>(m) + opts.l2 * w[i]);
      w[d] -= opts.lr * grad[d] / static_cast<double>(m);
    }
  }
}

int OneVsRestClassifier::predict(const double* row) const {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < classes_; ++c) {
    const double* w = &w_[static_cast<std::size_t>(c) * (dim_ + 1)];
    double s = w[dim_];
    for (std::size_t i = 0; i < dim_; ++i) s += w[i] * (row[i] - mean_[i]) * scale_[i];
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

double OneVsRestClassifier::accuracy(const Features& x, const std::vector<int>& y,
                                     const std::vector<std::size_t>& rows) const {
  if (rows.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t r : rows) hit += predict(x.row(r)) == y[r];
  return static_cast<double>(hit) / static_cast<double>(rows.size());
}

Split stratified_split(const std::vector<int>& y, int class_count, double train_frac,
                       std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> all(y.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto by = rows_by_class(y, all, class_count);
  SplitMix64 rng(seed);
  Split s;
  for (auto& rows : by) {
    shuffle(rows, rng);
    const std::size_t size = rows.size();
    auto take = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(size)));
    if (size >= 2) take = std::clamp<std::size_t>(take, 1, size - 1);
    else take = size;
    s.train.insert(s.train.end(), rows.begin(), rows.begin() + take);
    s.test.insert(s.test.end(), rows.begin() + take, rows.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

ClassifyResult classify_eval(const Features& x, const NodeLabels& labels, double train_frac,
                             int repeats, std::uint64_t seed, const LogisticOptions& opts) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (labels.cls.size() != x.rows()) {
    throw std::invalid_argument("label count does not match the embedding");
  }
  const int C = labels.class_count();
  ClassifyResult out;
  out.runs.assign(repeats, 0.0);
  std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < repeats; ++r) {
    Split s;
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 2 && !ok; ++attempt) {
      s = stratified_split(labels.cls, C, train_frac, derive_seed(seed, r, attempt));
      std::vector<bool> present(C, false);
      for (std::size_t i : s.train) present[labels.cls[i]] = true;
      ok = std::all_of(present.begin(), present.end(), [](bool b) { return b; }) &&
           !s.test.empty();
    }
    if (!ok) {
#pragma omp critical
      failure = "a class is missing from the training split";
      continue;
    }
    const OneVsRestClassifier clf(x, labels.cls, C, s.train, opts);
    out.runs[r] = clf.accuracy(x, labels.cls, s.test);
  }
  if (!failure.empty()) throw std::runtime_error(failure);
  out.mean = std::accumulate(out.runs.begin(), out.runs.end(), 0.0) / repeats;
  return out;
}

double cross_validated_accuracy(const Features& x, const NodeLabels& labels,
                                const std::vector<std::size_t>& rows, int folds,
                                std::uint64_t seed, const LogisticOptions& opts) {
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
  auto by = rows_by_class(labels.cls, rows, labels.class_count());
  SplitMix64 rng(seed);
  std::vector<int> fold_of(x.rows(), -1);
  std::size_t next = 0;
  for (auto& cls_rows : by) {
    shuffle(cls_rows, rng);
    for (std::size_t r : cls_rows) fold_of[r] = static_cast<int>(next++ % folds);
  }
  double sum = 0.0;
  int used = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t r : rows) (fold_of[r] == f ? test : train).push_back(r);
    if (test.empty() || train.empty()) continue;
    const OneVsRestClassifier clf(x, labels.cls, labels.class_count(), train, opts);
    sum += clf.accuracy(x, labels.cls, test);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("too few rows for cross-validation");
  return sum / used;
}

KMeansResult kmeans(const Features& x, int k, int restarts, std::uint64_t seed,
                    int max_iterations) {
  const std::size_t n = x.rows(), d = x.dim;
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("k exceeds the node count");

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int rs = 0; rs < restarts; ++rs) {
    SplitMix64 rng(derive_seed(seed, rs));
    std::vector<double> centers;
    centers.reserve(k * d);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t pick = rng.below(n);
    for (int c = 0; c < k; ++c) {
      if (c > 0) {
        double total = 0.0;
        for (double v : nearest) total += v;
        if (total > 0.0) {
          double u = rng.uniform() * total;
          pick = n - 1;
          for (std::size_t i = 0; i < n; ++i) {
            if ((u -= nearest[i]) < 0.0 && nearest[i] > 0.0) {
              pick = i;
              break;
            }
          }
        } else {
          pick = rng.below(n);  // all points coincide with chosen centers
        }
      }
      centers.insert(centers.end(), x.row(pick), x.row(pick) + d);
      for (std::size_t i = 0; i < n; ++i)
        nearest[i] = std::min(nearest[i], squared_distance(x.row(i), &centers[c * d], d));
    }

    std::vector<int> assign(n, -1);
    std::vector<double> history;
    double inertia = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
      bool changed = false;
      inertia = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        int arg = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double dist = squared_distance(x.row(i), &centers[c * d], d);
          if (dist < bd) {
            bd = dist;
            arg = c;
          }
        }
        changed |= assign[i] != arg;
        assign[i] = arg;
        inertia += bd;
      }
      history.push_back(inertia);
      if (!changed) break;
      // Empty clusters keep their previous center.
      std::vector<double> sum(k * d, 0.0);
      std::vector<std::size_t> size(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        ++size[assign[i]];
        for (std::size_t j = 0; j < d; ++j) sum[assign[i] * d + j] += x.row(i)[j];
      }
      for (int c = 0; c < k; ++c)
        if (size[c])
          for (std::size_t j = 0; j < d; ++j) centers[c * d + j] = sum[c * d + j] / size[c];
    }
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.assignment = assign;
      best.inertia_history = history;
    }
  }
  return best;
}

namespace {

double knn_mean_distance(const Features& x, std::size_t i, std::size_t k,
                         std::vector<double>& buf) {
  buf.clear();
  for (std::size_t j = 0; j < x.rows(); ++j)
    if (j != i) buf.push_back(std::sqrt(squared_distance(x.row(i), x.row(j), x.dim)));
  std::partial_sort(buf.begin(), buf.begin() + k, buf.end());
  double s = 0.0;
  for (std::size_t a = 0; a < k; ++a) s += buf[a];
  return s / static_cast<double>(k);
}

AnomalyResult finish_scores(std::vector<double> raw) {
  AnomalyResult out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo, span = *hi - *lo;
  out.score.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out.score[i] = span > 0 ? (raw[i] - min) / span : 0.0;
  out.ranking.resize(raw.size());
  std::iota(out.ranking.begin(), out.ranking.end(), NodeId{0});
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](NodeId a, NodeId b) { return out.score[a] > out.score[b]; });
  return out;
}

void check_knn(const Features& x, int k) {
  if (k < 1 || static_cast<std::size_t>(k) >= x.rows()) {
    throw std::invalid_argument("k_neighbors must lie in [1, node_count)");
  }
}

}  // namespace

AnomalyResult anomaly_scores(const Features& x, int k_neighbors) {
  check_knn(x, k_neighbors);
  std::vector<double> raw(x.rows());
#pragma omp parallel
  {
    std::vector<double> buf;
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(x.rows()); ++i)
      raw[i] = knn_mean_distance(x, i, k_neighbors, buf);
  }
  return finish_scores(std::move(raw));
}

AnomalyResult anomaly_scores_serial(const Features& x, int k_neighbors) {
  check_knn(x, k_neighbors);
  std::vector<double> raw(x.rows()), buf;
  for (std::size_t i = 0; i < x.rows(); ++i) raw[i] = knn_mean_distance(x, i, k_neighbors, buf);
  return finish_scores(std::move(raw));
}

std::vector<NodeId> nearest_neighbors(const Features& x, NodeId node, std::size_t m) {
  const std::size_t n = x.rows();
  if (node >= n) throw std::invalid_argument("unknown node " + std::to_string(node));
  if (m >= n) throw std::invalid_argument("m must be below the node count");
  std::vector<std::pair<double, NodeId>> all;
  all.reserve(n - 1);
  for (NodeId j = 0; j < n; ++j)
    if (j != node) all.emplace_back(squared_distance(x.row(node), x.row(j), x.dim), j);
  std::partial_sort(all.begin(), all.begin() + m, all.end());
  std::vector<NodeId> out(m);
  for (std::size_t a = 0; a < m; ++a) out[a] = all[a].second;
  return out;
}

}  // namespace flatstruct
