#include "flatstruct/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace flatstruct {

namespace {

std::string join_lines(const std::vector<std::string>& v) {
  std::string s = "invalid configuration:";
  for (const auto& p : v) s += "\n  " + p;
  return s;
}

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

// Shortest of %.15g / %.17g that reads back exactly.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("'" + v + "' is not a number");
  return x;
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("'" + v + "' is not an integer");
  return x;
}

int to_small_int(const std::string& v) {
  const long long x = to_int(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw std::invalid_argument("'" + v + "' is out of range");
  }
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("'" + v + "' is not a boolean");
}

std::string_view rule_name(AnonymousRule r) {
  return r == AnonymousRule::min_position ? "min_position" : "first_rank";
}
AnonymousRule parse_rule(const std::string& v) {
  if (v == "min_position") return AnonymousRule::min_position;
  if (v == "first_rank") return AnonymousRule::first_rank;
  throw std::invalid_argument("unknown anonymous-walk rule '" + v + "'");
}

std::size_t indicator_width(IndicatorKind k) { return k == IndicatorKind::gdv ? kOrbitCount : 1; }

std::size_t find_indicator(const PipelineConfig& cfg, const std::string& name) {
  const IndicatorKind kind = parse_indicator_kind(name);
  for (std::size_t i = 0; i < cfg.indicators.size(); ++i)
    if (cfg.indicators[i].kind == kind) return i;
  throw std::invalid_argument("indicator '" + name + "' is not listed in 'indicators'");
}

// Weight vectors take their shape from indicators / k_star / mode; entries
// start unset so a missing key can be reported.
void reshape_weights(PipelineConfig& cfg) {
  const std::size_t n = cfg.indicators.size(), hops = static_cast<std::size_t>(std::max(cfg.k_star, 0)) + 1;
  cfg.w_full.clear();
  cfg.w_hop.clear();
  cfg.w_ind.clear();
  if (cfg.weight_mode == WeightMode::full) cfg.w_full.assign(n * hops, kUnset);
  if (cfg.weight_mode == WeightMode::factored) {
    cfg.w_hop.assign(hops, kUnset);
    cfg.w_ind.assign(n, kUnset);
  }
}

void apply_indicator_key(IndicatorSetting& s, const std::string& field, const std::string& v) {
  auto& spec = s.spec;
  if (field == "standardize") s.standardize = to_bool(v);
  else if (field == "mode") spec.mode = parse_compare_mode(v);
  else if (field == "element") spec.element = parse_element_distance(v);
  else if (field == "ratio_shift") spec.ratio_shift = to_double(v);
  else if (field == "combiner") spec.combiner = parse_set_combiner(v);
  else if (field == "metric") spec.metric = parse_vector_metric(v);
  else if (field == "empty_value") {
    if (v == "none") spec.empty_value.reset();
    else spec.empty_value = to_double(v);
  } else if (field == "aggregators") {
    spec.aggregators.clear();
    for (const auto& item : split(v, ',')) {
      const auto colon = item.find(':');
      const Aggregator a = parse_aggregator(trim(item.substr(0, colon)));
      const double c = colon == std::string::npos ? 1.0 : to_double(trim(item.substr(colon + 1)));
      spec.aggregators.emplace_back(a, c);
    }
    if (spec.aggregators.empty()) throw std::invalid_argument("empty aggregator list");
  } else {
    throw std::invalid_argument("unknown key");
  }
}

void apply(PipelineConfig& cfg, const std::string& key, const std::string& v) {
  const auto parts = split(key, '.');
  const std::string head = parts.empty() ? "" : parts[0];
  if (key == "seed") {
    const long long s = to_int(v);
    if (s < 0) throw std::invalid_argument("must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "indicators") {
    std::vector<IndicatorSetting> next;
    for (const auto& name : split(v, ',')) {
      const IndicatorKind kind = parse_indicator_kind(name);
      IndicatorSetting s;
      s.kind = kind;
      for (const auto& old : cfg.indicators)
        if (old.kind == kind) s = old;
      for (const auto& seen : next)
        if (seen.kind == kind) throw std::invalid_argument("'" + name + "' listed twice");
      next.push_back(s);
    }
    if (next.empty()) throw std::invalid_argument("at least one indicator is required");
    cfg.indicators = std::move(next);
    reshape_weights(cfg);
  } else if (key == "k_star") {
    cfg.k_star = to_small_int(v);
    if (cfg.k_star < 0) throw std::invalid_argument("must be >= 0");
    reshape_weights(cfg);
  } else if (key == "weights.mode") {
    if (v == "uniform") cfg.weight_mode = WeightMode::uniform;
    else if (v == "full") cfg.weight_mode = WeightMode::full;
    else if (v == "factored") cfg.weight_mode = WeightMode::factored;
    else throw std::invalid_argument("expected uniform, full or factored");
    reshape_weights(cfg);
  } else if (head == "indicator" && parts.size() == 3) {
    apply_indicator_key(cfg.indicators[find_indicator(cfg, parts[1])], parts[2], v);
  } else if (head == "w" && parts.size() == 3) {
    if (cfg.weight_mode != WeightMode::full) throw std::invalid_argument("needs weights.mode = full");
    const std::size_t i = find_indicator(cfg, parts[1]);
    const int k = to_small_int(parts[2]);
    if (k < 0 || k > cfg.k_star) throw std::invalid_argument("hop outside 0..k_star");
    cfg.w_full[i * (cfg.k_star + 1) + k] = to_double(v);
  } else if (head == "w_hop" && parts.size() == 2) {
    if (cfg.weight_mode != WeightMode::factored) throw std::invalid_argument("needs weights.mode = factored");
    const int k = to_small_int(parts[1]);
    if (k < 0 || k > cfg.k_star) throw std::invalid_argument("hop outside 0..k_star");
    cfg.w_hop[k] = to_double(v);
  } else if (head == "w_ind" && parts.size() == 2) {
    if (cfg.weight_mode != WeightMode::factored) throw std::invalid_argument("needs weights.mode = factored");
    cfg.w_ind[find_indicator(cfg, parts[1])] = to_double(v);
  } else if (key == "indicator_walk.length") {
    cfg.indicator_options.walk_len = to_small_int(v);
  } else if (key == "indicator_walk.count") {
    cfg.indicator_options.walks_per_node = to_small_int(v);
  } else if (key == "indicator_walk.anonymous_rule") {
    cfg.indicator_options.anon_rule = parse_rule(v);
  } else if (key == "eigenvector.iterations") {
    cfg.indicator_options.eig_iterations = to_small_int(v);
  } else if (key == "eigenvector.tolerance") {
    cfg.indicator_options.eig_tolerance = to_double(v);
  } else if (key == "simgraph.mode") {
    if (v == "dense") cfg.simgraph = BuildMode::dense;
    else if (v == "pruned") cfg.simgraph = BuildMode::pruned;
    else throw std::invalid_argument("expected dense or pruned");
  } else if (key == "simgraph.c") {
    cfg.candidate_c = to_double(v);
  } else if (key == "transform.kind") {
    if (v == "exponential") cfg.transform.kind = TransformKind::exponential;
    else if (v == "linear") cfg.transform.kind = TransformKind::linear;
    else throw std::invalid_argument("expected exponential or linear");
  } else if (key == "transform.base") {
    cfg.transform.base = v == "e" ? 2.718281828459045 : to_double(v);
  } else if (key == "walk.count") {
    cfg.walks_per_node = to_small_int(v);
  } else if (key == "walk.length") {
    cfg.walk_len = to_small_int(v);
  } else if (key == "skipgram.dim") {
    cfg.skipgram.dim = to_small_int(v);
  } else if (key == "skipgram.window") {
    cfg.skipgram.window = to_small_int(v);
  } else if (key == "skipgram.epochs") {
    cfg.skipgram.epochs = to_small_int(v);
  } else if (key == "skipgram.objective") {
    cfg.skipgram.objective = parse_objective(v);
  } else if (key == "skipgram.negatives") {
    cfg.skipgram.negatives = to_small_int(v);
  } else if (key == "skipgram.lr") {
    cfg.skipgram.lr = to_double(v);
  } else {
    throw std::invalid_argument("unknown key");
  }
}

bool structural(const std::string& key) {
  return key == "indicators" || key == "k_star" || key == "weights.mode";
}

std::vector<std::string> violations(const PipelineConfig& cfg) {
  std::vector<std::string> out;
  auto check = [&](bool ok, const std::string& key, const std::string& rule) {
    if (!ok) out.push_back(key + ": " + rule);
  };
  check(!cfg.indicators.empty(), "indicators", "at least one indicator is required");
  for (const auto& s : cfg.indicators) {
    try {
      validate_spec(s.spec, indicator_width(s.kind));
    } catch (const std::exception& e) {
      out.push_back("indicator." + std::string(indicator_name(s.kind)) + ": " + e.what());
    }
  }
  check(cfg.k_star >= 0, "k_star", "must be >= 0");
  auto check_weights = [&](const std::vector<double>& w, auto key_of) {
    bool positive = false;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (std::isnan(w[j])) out.push_back(key_of(j) + ": missing");
      else if (!(w[j] >= 0.0) || !std::isfinite(w[j])) out.push_back(key_of(j) + ": must be finite and >= 0");
      positive |= w[j] > 0.0;
    }
    return positive;
  };
  const auto names = cfg.indicator_names();
  const std::size_t hops = static_cast<std::size_t>(std::max(cfg.k_star, 0)) + 1;
  if (cfg.weight_mode == WeightMode::full) {
    const bool pos = check_weights(cfg.w_full, [&](std::size_t j) {
      return "w." + names[j / hops] + "." + std::to_string(j % hops);
    });
    check(pos, "w", "at least one weight must be > 0");
  } else if (cfg.weight_mode == WeightMode::factored) {
    const bool hp = check_weights(cfg.w_hop, [](std::size_t j) { return "w_hop." + std::to_string(j); });
    const bool ip = check_weights(cfg.w_ind, [&](std::size_t j) { return "w_ind." + names[j]; });
    check(hp && ip, "w_hop/w_ind", "need a positive hop weight and a positive indicator weight");
  }
  check(cfg.indicator_options.walk_len >= 1, "indicator_walk.length", "must be >= 1");
  check(cfg.indicator_options.walks_per_node >= 1, "indicator_walk.count", "must be >= 1");
  check(cfg.indicator_options.eig_iterations >= 1, "eigenvector.iterations", "must be >= 1");
  check(cfg.indicator_options.eig_tolerance > 0.0, "eigenvector.tolerance", "must be > 0");
  check(cfg.candidate_c > 0.0 && std::isfinite(cfg.candidate_c), "simgraph.c", "must be > 0");
  check(cfg.transform.kind == TransformKind::linear || cfg.transform.base > 1.0, "transform.base",
        "must be > 1");
  check(cfg.walks_per_node >= 1, "walk.count", "must be >= 1");
  check(cfg.walk_len >= 2, "walk.length", "must be >= 2");
  check(cfg.skipgram.dim >= 1, "skipgram.dim", "must be >= 1");
  check(cfg.skipgram.window >= 1, "skipgram.window", "must be >= 1");
  check(cfg.skipgram.epochs >= 1, "skipgram.epochs", "must be >= 1");
  check(cfg.skipgram.negatives >= 1, "skipgram.negatives", "must be >= 1");
  check(cfg.skipgram.lr > 0.0 && std::isfinite(cfg.skipgram.lr), "skipgram.lr", "must be > 0");
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

WeightConfig PipelineConfig::weights() const {
  switch (weight_mode) {
    case WeightMode::full: return WeightConfig::full(indicators.size(), k_star, w_full);
    case WeightMode::factored: return WeightConfig::factored(w_hop, w_ind);
    default: return WeightConfig::uniform(indicators.size(), k_star);
  }
}

std::vector<std::string> PipelineConfig::indicator_names() const {
  std::vector<std::string> out;
  for (const auto& s : indicators) out.emplace_back(indicator_name(s.kind));
  return out;
}

PipelineConfig parse_config(std::istream& in) {
  struct Entry {
    std::string key, value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::vector<std::string> problems;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    for (const auto& prev : entries)
      if (prev.key == e.key) problems.push_back(e.key + ": set twice (lines " + std::to_string(prev.line) + " and " + std::to_string(line_no) + ")");
    entries.push_back(std::move(e));
  }

  PipelineConfig cfg;
  // Keys that shape other keys go first, in a fixed order.
  for (const char* key : {"indicators", "k_star", "weights.mode"}) {
    for (const auto& e : entries) {
      if (e.key != key) continue;
      try {
        apply(cfg, e.key, e.value);
      } catch (const std::exception& ex) {
        problems.push_back(e.key + ": " + ex.what());
      }
    }
  }
  for (const auto& e : entries) {
    if (structural(e.key)) continue;
    try {
      apply(cfg, e.key, e.value);
    } catch (const std::exception& ex) {
      problems.push_back(e.key + ": " + ex.what());
    }
  }
  for (auto& p : violations(cfg)) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path});
  return parse_config(in);
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  try {
    apply(cfg, key, value);
  } catch (const std::exception& ex) {
    throw ConfigError({key + ": " + ex.what()});
  }
}

void validate_config(const PipelineConfig& cfg) {
  auto problems = violations(cfg);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  const auto names = cfg.indicator_names();
  out << "seed = " << cfg.seed << '\n';
  out << "indicators = ";
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  out << '\n';
  for (const auto& s : cfg.indicators) {
    const std::string p = "indicator." + std::string(indicator_name(s.kind)) + ".";
    out << p << "standardize = " << (s.standardize ? "true" : "false") << '\n';
    out << p << "mode = " << to_string(s.spec.mode) << '\n';
    out << p << "element = " << to_string(s.spec.element) << '\n';
    out << p << "ratio_shift = " << num(s.spec.ratio_shift) << '\n';
    out << p << "aggregators = ";
    for (std::size_t j = 0; j < s.spec.aggregators.size(); ++j) {
      out << (j ? ", " : "") << to_string(s.spec.aggregators[j].first) << ':'
          << num(s.spec.aggregators[j].second);
    }
    out << '\n';
    out << p << "combiner = " << to_string(s.spec.combiner) << '\n';
    out << p << "metric = " << to_string(s.spec.metric) << '\n';
    out << p << "empty_value = " << (s.spec.empty_value ? num(*s.spec.empty_value) : "none") << '\n';
  }
  out << "indicator_walk.length = " << cfg.indicator_options.walk_len << '\n';
  out << "indicator_walk.count = " << cfg.indicator_options.walks_per_node << '\n';
  out << "indicator_walk.anonymous_rule = " << rule_name(cfg.indicator_options.anon_rule) << '\n';
  out << "eigenvector.iterations = " << cfg.indicator_options.eig_iterations << '\n';
  out << "eigenvector.tolerance = " << num(cfg.indicator_options.eig_tolerance) << '\n';
  out << "k_star = " << cfg.k_star << '\n';
  const std::size_t hops = static_cast<std::size_t>(cfg.k_star) + 1;
  switch (cfg.weight_mode) {
    case WeightMode::uniform: out << "weights.mode = uniform\n"; break;
    case WeightMode::full:
      out << "weights.mode = full\n";
      for (std::size_t j = 0; j < cfg.w_full.size(); ++j)
        out << "w." << names[j / hops] << '.' << j % hops << " = " << num(cfg.w_full[j]) << '\n';
      break;
    case WeightMode::factored:
      out << "weights.mode = factored\n";
      for (std::size_t k = 0; k < cfg.w_hop.size(); ++k) out << "w_hop." << k << " = " << num(cfg.w_hop[k]) << '\n';
      for (std::size_t i = 0; i < cfg.w_ind.size(); ++i) out << "w_ind." << names[i] << " = " << num(cfg.w_ind[i]) << '\n';
      break;
  }
  out << "simgraph.mode = " << (cfg.simgraph == BuildMode::dense ? "dense" : "pruned") << '\n';
  out << "simgraph.c = " << num(cfg.candidate_c) << '\n';
  out << "transform.kind = " << (cfg.transform.kind == TransformKind::exponential ? "exponential" : "linear") << '\n';
  out << "transform.base = " << num(cfg.transform.base) << '\n';
  out << "walk.count = " << cfg.walks_per_node << '\n';
  out << "walk.length = " << cfg.walk_len << '\n';
  out << "skipgram.dim = " << cfg.skipgram.dim << '\n';
  out << "skipgram.window = " << cfg.skipgram.window << '\n';
  out << "skipgram.epochs = " << cfg.skipgram.epochs << '\n';
  out << "skipgram.objective = " << to_string(cfg.skipgram.objective) << '\n';
  out << "skipgram.negatives = " << cfg.skipgram.negatives << '\n';
  out << "skipgram.lr = " << num(cfg.skipgram.lr) << '\n';
  return out.str();
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_config(cfg);
}

}  // namespace flatstruct
