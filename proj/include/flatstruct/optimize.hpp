#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "flatstruct/similarity.hpp"

namespace flatstruct {

struct ParamSpec {
  enum class Kind { continuous, integer, categorical };
  std::string name;
  Kind kind = Kind::continuous;
  double lo = 0.0, hi = 1.0;
  bool log = false;                  // sample log-uniformly (lo > 0)
  std::vector<std::string> options;  // categorical only; values are indices
};

class SearchSpace {
 public:
  SearchSpace& add_continuous(std::string name, double lo, double hi, bool log = false);
  SearchSpace& add_integer(std::string name, long lo, long hi, bool log = false);
  SearchSpace& add_categorical(std::string name, std::vector<std::string> options);

  const std::vector<ParamSpec>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  std::size_t index_of(const std::string& name) const;  // throws if absent
  bool contains(const std::vector<double>& values) const;
  /// Text form of one value (%.17g, integer, or the option name).
  std::string format(std::size_t param, double value) const;
  double parse(std::size_t param, const std::string& text) const;

 private:
  std::vector<ParamSpec> params_;
};

struct TrialRecord {
  std::size_t index = 0;
  std::vector<double> values;  // aligned with SearchSpace::params()
  double objective = 0.0;      // higher is better
  bool failed = false;
  std::string error;
  std::uint64_t seed = 0;
  double seconds = 0.0;  // wall time; kept out of the log so logs stay reproducible
};

/// Objective to maximize; gets the assignment and a per-trial seed. Throwing
/// marks the trial failed.
using TrialObjective = std::function<double(const std::vector<double>&, std::uint64_t)>;
using TrialCallback = std::function<void(const TrialRecord&)>;

struct TpeOptions {
  int trials = 100;
  double gamma = 0.25;
  int startup_trials = 10;
  int candidates = 24;
  std::uint64_t seed = 0;
};

struct OptimizeResult {
  std::vector<TrialRecord> history;
  std::size_t best = static_cast<std::size_t>(-1);  // index into history; -1 if all failed
  bool has_best() const { return best < history.size(); }
  const TrialRecord& best_trial() const;
  /// Best objective seen after each trial (NaN until the first success).
  std::vector<double> best_so_far() const;
};

/// Tree-structured Parzen estimator. `prior` holds already-finished trials
/// (e.g. read back from a log); the run continues at trial prior.size() and
/// stops once `opts.trials` trials exist in total. Suggestions depend only on
/// the seed and the history, so a resumed run matches an uninterrupted one.
OptimizeResult tpe_optimize(const SearchSpace& space, const TrialObjective& objective,
                            const TpeOptions& opts, std::vector<TrialRecord> prior = {},
                            const TrialCallback& on_trial = {});

OptimizeResult random_search(const SearchSpace& space, const TrialObjective& objective,
                             int trials, std::uint64_t seed, std::vector<TrialRecord> prior = {},
                             const TrialCallback& on_trial = {});

/// One record per line: "trial=<i> status=ok|failed objective=<v> seed=<s>
/// <name>=<value> ...".
void write_trial_record(std::ostream& out, const SearchSpace& space, const TrialRecord& rec);
std::vector<TrialRecord> read_trial_log(std::istream& in, const SearchSpace& space);

/// Normalized |w_ik| shares of a weight configuration.
struct WeightShare {
  std::string indicator;
  int k = 0;
  double share = 0.0;
};
/// Sorted by share, descending; shares sum to 1. Throws if all weights are 0.
std::vector<WeightShare> weight_shares(const WeightConfig& w,
                                       const std::vector<std::string>& indicator_names);
/// Text report: full share table, top-5 summary, and for factored configs the
/// hop and indicator factors on their own.
std::string weight_report(const WeightConfig& w, const std::vector<std::string>& indicator_names);

}  // namespace flatstruct
