#include "flatstruct/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "flatstruct/parallel.hpp"

namespace flatstruct {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_name(const std::vector<ParamSpec>& params, const std::string& name) {
  if (name.empty() || name.find_first_of(" \t=") != std::string::npos) {
    throw std::invalid_argument("bad parameter name '" + name + "'");
  }
  for (const auto& p : params)
    if (p.name == name) throw std::invalid_argument("duplicate parameter '" + name + "'");
}

}  // namespace

SearchSpace& SearchSpace::add_continuous(std::string name, double lo, double hi, bool log) {
  check_name(params_, name);
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("parameter '" + name + "': need lo < hi");
  }
  if (log && !(lo > 0)) throw std::invalid_argument("parameter '" + name + "': log scale needs lo > 0");
  params_.push_back({std::move(name), ParamSpec::Kind::continuous, lo, hi, log, {}});
  return *this;
}

SearchSpace& SearchSpace::add_integer(std::string name, long lo, long hi, bool log) {
  add_continuous(std::move(name), static_cast<double>(lo), static_cast<double>(hi), log);
  params_.back().kind = ParamSpec::Kind::integer;
  return *this;
}

SearchSpace& SearchSpace::add_categorical(std::string name, std::vector<std::string> options) {
  check_name(params_, name);
  if (options.empty()) throw std::invalid_argument("parameter '" + name + "': no options");
  const double hi = static_cast<double>(options.size() - 1);
  params_.push_back({std::move(name), ParamSpec::Kind::categorical, 0.0, hi, false,
                     std::move(options)});
  return *this;
}

std::size_t SearchSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  throw std::invalid_argument("no parameter named '" + name + "'");
}

bool SearchSpace::contains(const std::vector<double>& values) const {
  if (values.size() != params_.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& p = params_[i];
    const double v = values[i];
    if (!(v >= p.lo && v <= p.hi)) return false;
    if (p.kind != ParamSpec::Kind::continuous && v != std::round(v)) return false;
  }
  return true;
}

std::string SearchSpace::format(std::size_t param, double value) const {
  const auto& p = params_.at(param);
  switch (p.kind) {
    case ParamSpec::Kind::categorical: return p.options.at(static_cast<std::size_t>(value));
    case ParamSpec::Kind::integer: return std::to_string(std::lround(value));
    default: return fmt17(value);
  }
}

double SearchSpace::parse(std::size_t param, const std::string& text) const {
  const auto& p = params_.at(param);
  if (p.kind == ParamSpec::Kind::categorical) {
    const auto it = std::find(p.options.begin(), p.options.end(), text);
    if (it == p.options.end()) throw std::invalid_argument(p.name + ": unknown option '" + text + "'");
    return static_cast<double>(it - p.options.begin());
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw std::invalid_argument(p.name + ": '" + text + "' is not a number");
  }
  return v;
}

const TrialRecord& OptimizeResult::best_trial() const {
  if (!has_best()) throw std::runtime_error("every trial failed");
  return history[best];
}

std::vector<double> OptimizeResult::best_so_far() const {
  std::vector<double> out;
  double best_v = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : history) {
    if (!r.failed && (std::isnan(best_v) || r.objective > best_v)) best_v = r.objective;
    out.push_back(best_v);
  }
  return out;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Parameters are modelled in an internal coordinate: log(x) for log-scaled
// parameters, x otherwise.
struct Range {
  double lo, hi;
};
Range internal_range(const ParamSpec& p) {
  if (p.log) return {std::log(p.lo), std::log(p.hi)};
  if (p.kind == ParamSpec::Kind::integer) return {p.lo - 0.5, p.hi + 0.5};
  return {p.lo, p.hi};
}
double to_internal(const ParamSpec& p, double v) { return p.log ? std::log(v) : v; }
double to_external(const ParamSpec& p, double u) {
  double v = p.log ? std::exp(u) : u;
  if (p.kind == ParamSpec::Kind::integer) v = std::round(v);
  return std::clamp(v, p.lo, p.hi);
}

double normal_draw(SplitMix64& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double sample_uniform(const ParamSpec& p, SplitMix64& rng) {
  if (p.kind == ParamSpec::Kind::categorical) {
    return static_cast<double>(rng.below(p.options.size()));
  }
  if (p.kind == ParamSpec::Kind::integer && !p.log) {
    return p.lo + static_cast<double>(rng.below(static_cast<std::uint64_t>(p.hi - p.lo) + 1));
  }
  const Range r = internal_range(p);
  return to_external(p, r.lo + rng.uniform() * (r.hi - r.lo));
}

// Truncated Gaussian mixture over the observations plus one uniform prior
// component over the range.
class NumericParzen {
 public:
  NumericParzen(const ParamSpec& p, const std::vector<double>& observed) : spec_(p) {
    range_ = internal_range(p);
    const double width = range_.hi - range_.lo;
    for (double v : observed) centers_.push_back(to_internal(p, v));
    const double m = static_cast<double>(centers_.size());
    double sd = width;
    if (centers_.size() >= 2) {
      const double mean = std::accumulate(centers_.begin(), centers_.end(), 0.0) / m;
      double var = 0.0;
      for (double c : centers_) var += (c - mean) * (c - mean);
      sd = std::sqrt(var / (m - 1));
    }
    // Scott's rule, floor-clamped at width/min(100, m+1) (hyperopt's clip):
    // with a fixed small floor the good set collapses onto its densest
    // cluster and l/g keeps proposing it.
    const double floor = width / std::min(100.0, m + 1.0);
    bandwidth_ = std::clamp(1.06 * sd * std::pow(std::max(m, 1.0), -0.2), floor, width);
    for (double c : centers_) {
      mass_.push_back(normal_cdf((range_.hi - c) / bandwidth_) -
                      normal_cdf((range_.lo - c) / bandwidth_));
    }
  }

  double sample(SplitMix64& rng) const {
    const std::size_t j = rng.below(centers_.size() + 1);
    if (j == centers_.size()) return to_external(spec_, range_.lo + rng.uniform() * (range_.hi - range_.lo));
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double u = centers_[j] + bandwidth_ * normal_draw(rng);
      if (u >= range_.lo && u <= range_.hi) return to_external(spec_, u);
    }
    return to_external(spec_, centers_[j]);
  }

  double log_density(double v) const {
    const double u = to_internal(spec_, v);
    double dens = 1.0 / (range_.hi - range_.lo);
    for (std::size_t j = 0; j < centers_.size(); ++j) {
      const double z = (u - centers_[j]) / bandwidth_;
      dens += std::exp(-0.5 * z * z) / (bandwidth_ * std::sqrt(2.0 * kPi) * std::max(mass_[j], 1e-300));
    }
    return std::log(dens / static_cast<double>(centers_.size() + 1));
  }

 private:
  const ParamSpec& spec_;
  Range range_{};
  std::vector<double> centers_, mass_;
  double bandwidth_ = 1.0;
};

class CategoricalParzen {
 public:
  CategoricalParzen(const ParamSpec& p, const std::vector<double>& observed)
      : prob_(p.options.size(), 1.0) {
    for (double v : observed) prob_[static_cast<std::size_t>(v)] += 1.0;
    const double total = std::accumulate(prob_.begin(), prob_.end(), 0.0);
    for (double& x : prob_) x /= total;
  }
  double sample(SplitMix64& rng) const {
    double u = rng.uniform();
    for (std::size_t c = 0; c + 1 < prob_.size(); ++c)
      if ((u -= prob_[c]) < 0) return static_cast<double>(c);
    return static_cast<double>(prob_.size() - 1);
  }
  double log_density(double v) const { return std::log(prob_[static_cast<std::size_t>(v)]); }

 private:
  std::vector<double> prob_;
};

std::vector<double> uniform_assignment(const SearchSpace& space, SplitMix64& rng) {
  std::vector<double> v;
  for (const auto& p : space.params()) v.push_back(sample_uniform(p, rng));
  return v;
}

std::vector<double> tpe_suggest(const SearchSpace& space, const std::vector<TrialRecord>& history,
                                const TpeOptions& opts, SplitMix64& rng) {
  std::vector<const TrialRecord*> ok, failed;
  for (const auto& r : history) (r.failed ? failed : ok).push_back(&r);
  if (history.size() < static_cast<std::size_t>(opts.startup_trials) || ok.size() < 2) {
    return uniform_assignment(space, rng);
  }
  std::stable_sort(ok.begin(), ok.end(), [](const TrialRecord* a, const TrialRecord* b) {
    return a->objective > b->objective;
  });
  const auto n_good = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(opts.gamma * static_cast<double>(ok.size()))));
  std::vector<const TrialRecord*> good(ok.begin(), ok.begin() + n_good);
  std::vector<const TrialRecord*> bad(ok.begin() + n_good, ok.end());
  bad.insert(bad.end(), failed.begin(), failed.end());

  const std::size_t P = space.size();
  std::vector<std::vector<double>> cand(opts.candidates, std::vector<double>(P));
  std::vector<double> score(opts.candidates, 0.0);
  for (std::size_t i = 0; i < P; ++i) {
    const auto& p = space.params()[i];
    std::vector<double> gv, bv;
    for (auto* r : good) gv.push_back(r->values[i]);
    for (auto* r : bad) bv.push_back(r->values[i]);
    auto run = [&](const auto& l, const auto& g) {
      for (int c = 0; c < opts.candidates; ++c) {
        cand[c][i] = l.sample(rng);
        score[c] += l.log_density(cand[c][i]) - g.log_density(cand[c][i]);
      }
    };
    if (p.kind == ParamSpec::Kind::categorical) {
      run(CategoricalParzen(p, gv), CategoricalParzen(p, bv));
    } else {
      run(NumericParzen(p, gv), NumericParzen(p, bv));
    }
  }
  const auto best = std::max_element(score.begin(), score.end()) - score.begin();
  return cand[best];
}

template <typename Suggest>
OptimizeResult run_trials(const SearchSpace& space, const TrialObjective& objective, int trials,
                          std::uint64_t seed, std::vector<TrialRecord> prior,
                          const TrialCallback& on_trial, Suggest&& suggest) {
  if (space.size() == 0) throw std::invalid_argument("empty search space");
  for (const auto& r : prior) {
    if (!space.contains(r.values)) throw std::invalid_argument("prior trial lies outside the search space");
  }
  OptimizeResult res;
  res.history = std::move(prior);
  for (auto t = res.history.size(); t < static_cast<std::size_t>(trials); ++t) {
    SplitMix64 rng(derive_seed(seed, 0x7be5ULL, t));
    TrialRecord rec;
    rec.index = t;
    rec.values = suggest(res.history, rng);
    rec.seed = derive_seed(seed, t);
    const auto start = std::chrono::steady_clock::now();
    try {
      rec.objective = objective(rec.values, rec.seed);
      if (!std::isfinite(rec.objective)) {
        rec.failed = true;
        rec.error = "objective is not finite";
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    if (rec.failed) rec.objective = std::numeric_limits<double>::quiet_NaN();
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_trial) on_trial(rec);
    res.history.push_back(std::move(rec));
  }
  for (std::size_t i = 0; i < res.history.size(); ++i) {
    const auto& r = res.history[i];
    if (!r.failed && (!res.has_best() || r.objective > res.history[res.best].objective)) res.best = i;
  }
  return res;
}

}  // namespace

OptimizeResult tpe_optimize(const SearchSpace& space, const TrialObjective& objective,
                            const TpeOptions& opts, std::vector<TrialRecord> prior,
                            const TrialCallback& on_trial) {
  if (opts.startup_trials < 1 || opts.trials < opts.startup_trials) {
    throw std::invalid_argument("need trials >= startup_trials >= 1");
  }
  if (!(opts.gamma > 0.0 && opts.gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (opts.candidates < 1) throw std::invalid_argument("need at least one candidate");
  return run_trials(space, objective, opts.trials, opts.seed, std::move(prior), on_trial,
                    [&](const std::vector<TrialRecord>& h, SplitMix64& rng) {
                      return tpe_suggest(space, h, opts, rng);
                    });
}

OptimizeResult random_search(const SearchSpace& space, const TrialObjective& objective,
                             int trials, std::uint64_t seed, std::vector<TrialRecord> prior,
                             const TrialCallback& on_trial) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  return run_trials(space, objective, trials, seed, std::move(prior), on_trial,
                    [&](const std::vector<TrialRecord>&, SplitMix64& rng) {
                      return uniform_assignment(space, rng);
                    });
}

void write_trial_record(std::ostream& out, const SearchSpace& space, const TrialRecord& rec) {
  out << "trial=" << rec.index << " status=" << (rec.failed ? "failed" : "ok")
      << " objective=" << (rec.failed ? std::string("nan") : fmt17(rec.objective))
      << " seed=" << rec.seed;
  for (std::size_t i = 0; i < space.size(); ++i)
    out << ' ' << space.params()[i].name << '=' << space.format(i, rec.values[i]);
  out << '\n';
}

std::vector<TrialRecord> read_trial_log(std::istream& in, const SearchSpace& space) {
  std::vector<TrialRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::map<std::string, std::string> kv;
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw ParseError("trial log line " + std::to_string(line_no) + ": '" + tok + "' is not key=value");
      }
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (kv.empty()) continue;
    const std::string where = "trial log line " + std::to_string(line_no) + ": ";
    auto need = [&](const std::string& key) -> const std::string& {
      const auto it = kv.find(key);
      if (it == kv.end()) throw ParseError(where + "missing '" + key + "'");
      return it->second;
    };
    TrialRecord rec;
    try {
      rec.index = std::stoull(need("trial"));
      rec.failed = need("status") == "failed";
      rec.objective = rec.failed ? std::numeric_limits<double>::quiet_NaN() : std::stod(need("objective"));
      rec.seed = std::stoull(need("seed"));
      for (std::size_t i = 0; i < space.size(); ++i)
        rec.values.push_back(space.parse(i, need(space.params()[i].name)));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(where + e.what());
    }
    if (rec.index != out.size()) throw ParseError(where + "trials out of order");
    if (!space.contains(rec.values)) throw ParseError(where + "values outside the search space");
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<WeightShare> weight_shares(const WeightConfig& w,
                                       const std::vector<std::string>& indicator_names) {
  if (indicator_names.size() != w.indicator_count()) {
    throw std::invalid_argument("indicator names do not match the weight config");
  }
  std::vector<WeightShare> out;
  double total = 0.0;
  for (std::size_t i = 0; i < w.indicator_count(); ++i) {
    for (int k = 0; k <= w.k_star(); ++k) {
      const double v = std::abs(w.weight(i, k));
      out.push_back({indicator_names[i], k, v});
      total += v;
    }
  }
  if (!(total > 0.0)) throw std::invalid_argument("all weights are zero");
  for (auto& s : out) s.share /= total;
  std::stable_sort(out.begin(), out.end(),
                   [](const WeightShare& a, const WeightShare& b) { return a.share > b.share; });
  return out;
}

std::string weight_report(const WeightConfig& w, const std::vector<std::string>& indicator_names) {
  const auto shares = weight_shares(w, indicator_names);
  std::size_t width = 9;
  for (const auto& n : indicator_names) width = std::max(width, n.size());
  std::ostringstream out;
  char buf[160];
  out << "weight shares (normalized |w_ik|)\n";
  std::snprintf(buf, sizeof buf, "  %-*s %3s %9s\n", static_cast<int>(width), "indicator", "k", "share");
  out << buf;
  for (const auto& s : shares) {
    std::snprintf(buf, sizeof buf, "  %-*s %3d %8.2f%%\n", static_cast<int>(width), s.indicator.c_str(),
                  s.k, 100.0 * s.share);
    out << buf;
  }
  out << "top " << std::min<std::size_t>(5, shares.size()) << ":";
  for (std::size_t i = 0; i < std::min<std::size_t>(5, shares.size()); ++i) {
    std::snprintf(buf, sizeof buf, "%s %s at hop %d (%.1f%%)", i ? "," : "", shares[i].indicator.c_str(),
                  shares[i].k, 100.0 * shares[i].share);
    out << buf;
  }
  out << '\n';
  if (w.is_factored()) {
    out << "hop factors:";
    for (int k = 0; k <= w.k_star(); ++k) out << " w_hop." << k << '=' << fmt17(w.hop(k));
    out << "\nindicator factors:";
    for (std::size_t i = 0; i < w.indicator_count(); ++i)
      out << " w_ind." << indicator_names[i] << '=' << fmt17(w.ind(i));
    out << '\n';
  }
  return out.str();
}

}  // namespace flatstruct
