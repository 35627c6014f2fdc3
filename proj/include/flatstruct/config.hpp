#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatstruct/indicators.hpp"
#include "flatstruct/similarity.hpp"
#include "flatstruct/simgraph.hpp"
#include "flatstruct/skipgram.hpp"

namespace flatstruct {

/// Invalid configuration; what() lists every offending key, one per line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct IndicatorSetting {
  IndicatorKind kind = IndicatorKind::degree;
  bool standardize = false;
  ComparisonSpec spec;
};

enum class WeightMode { uniform, full, factored };

struct PipelineConfig {
  std::uint64_t seed = 1;
  std::vector<IndicatorSetting> indicators{IndicatorSetting{}};
  IndicatorOptions indicator_options;  // seed is overwritten from `seed`
  int k_star = 4;
  WeightMode weight_mode = WeightMode::uniform;
  std::vector<double> w_full;  // indicator-major, (k_star + 1) per indicator
  std::vector<double> w_hop, w_ind;
  BuildMode simgraph = BuildMode::dense;
  double candidate_c = 2.0;
  WeightTransform transform;
  int walks_per_node = 10;
  int walk_len = 80;
  SkipGramOptions skipgram;

  WeightConfig weights() const;
  std::vector<std::string> indicator_names() const;
};

/// `key = value` lines; '#' starts a comment. Unset keys keep their defaults.
/// Throws ConfigError naming every bad, unknown, or missing key.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::string& path);
/// Applies one more assignment on top of `cfg` (same keys as the file).
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);
/// Throws ConfigError listing every violated range or consistency rule.
void validate_config(const PipelineConfig& cfg);

/// Every key, canonical order; parse_config(serialize) reproduces the config.
std::string serialize_config(const PipelineConfig& cfg);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace flatstruct
