#include "comprag/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "comprag/errors.hpp"

namespace comprag {
namespace {

struct RawValue {
  std::string text;
  bool quoted = false;
  size_t line = 0;
};

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// section.key -> raw value
std::map<std::string, RawValue> parse_raw(std::string_view text, std::string_view origin) {
  std::map<std::string, RawValue> values;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  size_t line_no = 0;
  const auto fail = [&](const std::string& why) -> void {
    throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']') fail("malformed section header");
      section = trim(std::string_view(stripped).substr(1, stripped.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    if (key.empty()) fail("empty key");
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    // strip trailing comment outside quotes
    bool quoted = false;
    if (!value.empty() && value.front() == '"') {
      const size_t close = value.find('"', 1);
      if (close == std::string::npos) fail("unterminated string");
      const std::string rest = trim(std::string_view(value).substr(close + 1));
      if (!rest.empty() && rest[0] != '#') fail("trailing characters after string value");
      value = value.substr(1, close - 1);
      quoted = true;
    } else {
      const size_t hash = value.find('#');
      if (hash != std::string::npos) value = trim(std::string_view(value).substr(0, hash));
      if (value.empty()) fail("missing value");
    }
    const std::string full_key = section.empty() ? key : section + "." + key;
    if (!values.emplace(full_key, RawValue{value, quoted, line_no}).second) {
      fail("duplicate key '" + full_key + "'");
    }
  }
  return values;
}

class ConfigReader {
 public:
  ConfigReader(std::map<std::string, RawValue> values, std::string origin)
      : values_(std::move(values)), origin_(std::move(origin)) {}

  bool take_string(const std::string& key, std::string* out) {
    auto it = values_.find(key);
    if (it == values_.end()) return false;
    if (!it->second.quoted) fail(it->second.line, "'" + key + "' must be a quoted string");
    *out = it->second.text;
    consumed_.insert(key);
    return true;
  }

  bool take_double(const std::string& key, double* out) {
    auto it = values_.find(key);
    if (it == values_.end()) return false;
    if (it->second.quoted) fail(it->second.line, "'" + key + "' must be a number");
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second.text, &used);
    } catch (const std::exception&) {
      fail(it->second.line, "'" + key + "' is not a number");
    }
    if (used != it->second.text.size() || !std::isfinite(v)) {
      fail(it->second.line, "'" + key + "' is not a finite number");
    }
    *out = v;
    consumed_.insert(key);
    return true;
  }

  bool take_size(const std::string& key, std::size_t* out) {
    double v = 0.0;
    auto it = values_.find(key);
    if (it == values_.end()) return false;
    const size_t line = it->second.line;
    if (!take_double(key, &v)) return false;
    if (v < 0 || v != std::floor(v)) fail(line, "'" + key + "' must be a nonnegative integer");
    *out = static_cast<std::size_t>(v);
    return true;
  }

  void reject_unknown() const {
    for (const auto& [key, raw] : values_) {
      if (consumed_.count(key) == 0) {
        fail(raw.line, "unknown configuration key '" + key + "'");
      }
    }
  }

  [[noreturn]] void fail(size_t line, const std::string& why) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + why);
  }

 private:
  std::map<std::string, RawValue> values_;
  std::string origin_;
  std::set<std::string> consumed_;
};

ChunkingStrategy parse_strategy(const std::string& s) {
  if (s == "rule_based") return ChunkingStrategy::kRuleBased;
  if (s == "external_synthesizer") return ChunkingStrategy::kExternalSynthesizer;
  throw ConfigError("chunking.strategy must be 'rule_based' or 'external_synthesizer', got '" +
                    s + "'");
}

EvaluatorMode parse_mode(const std::string& s) {
  if (s == "pass_through") return EvaluatorMode::kPassThrough;
  if (s == "filter") return EvaluatorMode::kFilter;
  if (s == "fuse") return EvaluatorMode::kFuse;
  throw ConfigError("evaluator.mode must be 'pass_through', 'filter' or 'fuse', got '" + s + "'");
}

MissingPolicy parse_missing(const std::string& s) {
  if (s == "drop") return MissingPolicy::kDrop;
  if (s == "keep_zero") return MissingPolicy::kKeepZero;
  if (s == "keep_semantic") return MissingPolicy::kKeepSemantic;
  throw ConfigError("evaluator.missing_policy must be 'drop', 'keep_zero' or 'keep_semantic', "
                    "got '" + s + "'");
}

}  // namespace

PipelineConfig parse_config(std::string_view toml_text, std::string_view origin) {
  ConfigReader reader(parse_raw(toml_text, origin), std::string(origin));
  PipelineConfig cfg;
  std::string s;

  reader.take_size("embedder.dim", &cfg.embedder.dim);
  if (reader.take_string("embedder.mode", &s)) {
    if (s != "local" && s != "remote") {
      throw ConfigError("embedder.mode must be 'local' or 'remote', got '" + s + "'");
    }
    cfg.embedder.mode = s;
  }
  reader.take_string("embedder.remote_url", &cfg.embedder.remote_url);

  reader.take_size("chunking.target_size", &cfg.chunking.target_size);
  reader.take_double("chunking.tolerance", &cfg.chunking.tolerance);
  if (reader.take_string("chunking.strategy", &s)) cfg.chunking.strategy = parse_strategy(s);

  if (reader.take_string("evaluator.mode", &s)) cfg.evaluator.mode = parse_mode(s);
  reader.take_double("evaluator.alpha", &cfg.evaluator.alpha);
  std::size_t cutoff = 0;
  if (reader.take_size("evaluator.cutoff_m", &cutoff)) {
    // 0 means unlimited
    cfg.evaluator.cutoff_m = cutoff == 0 ? std::nullopt : std::optional<std::size_t>(cutoff);
  }
  if (reader.take_string("evaluator.missing_policy", &s)) {
    cfg.evaluator.missing_policy = parse_missing(s);
  }

  reader.take_size("query.k", &cfg.query_k);

  reader.take_double("recommender.w_nps", &cfg.weights.w_nps);
  reader.take_double("recommender.w_time", &cfg.weights.w_time);
  reader.take_double("recommender.w_review", &cfg.weights.w_review);
  reader.take_double("recommender.w_prox", &cfg.weights.w_prox);
  reader.take_double("recommender.nps_min", &cfg.bounds.nps.min);
  reader.take_double("recommender.nps_max", &cfg.bounds.nps.max);
  reader.take_double("recommender.time_min", &cfg.bounds.response_time_min.min);
  reader.take_double("recommender.time_max", &cfg.bounds.response_time_min.max);
  reader.take_double("recommender.review_min", &cfg.bounds.review_score.min);
  reader.take_double("recommender.review_max", &cfg.bounds.review_score.max);
  reader.take_double("recommender.prox_min", &cfg.bounds.proximity_km.min);
  reader.take_double("recommender.prox_max", &cfg.bounds.proximity_km.max);

  if (reader.take_string("generator.mode", &s)) {
    if (s != "template" && s != "remote") {
      throw ConfigError("generator.mode must be 'template' or 'remote', got '" + s + "'");
    }
    cfg.generator.mode = s;
  }
  reader.take_string("generator.remote_url", &cfg.generator.remote_url);

  if (reader.take_string("paths.index", &s)) cfg.paths.index_file = s;
  if (reader.take_string("paths.filtration", &s)) cfg.paths.filtration_file = s;

  reader.reject_unknown();
  validate_config(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string());
}

void validate_config(const PipelineConfig& config) {
  const auto fail = [](const std::string& why) -> void { throw ConfigError(why); };

  if (config.embedder.dim < 1) fail("embedder.dim must be >= 1");
  if (config.chunking.target_size < 1) fail("chunking.target_size must be >= 1");
  if (!(config.chunking.tolerance >= 0.0 && config.chunking.tolerance <= 1.0)) {
    fail("chunking.tolerance must lie in [0, 1]");
  }
  if (!(config.evaluator.alpha >= 0.0 && config.evaluator.alpha <= 1.0)) {
    fail("evaluator.alpha must lie in [0, 1]");
  }
  if (config.query_k < 1) fail("query.k must be >= 1");

  const MetricWeights& w = config.weights;
  for (double v : {w.w_nps, w.w_time, w.w_review, w.w_prox}) {
    if (!(v >= 0.0)) fail("recommender weights must be nonnegative");
  }
  if (std::abs(w.w_nps + w.w_time + w.w_review + w.w_prox - 1.0) > 1e-9) {
    fail("recommender weights must sum to 1");
  }
  for (const MetricBound* b : {&config.bounds.nps, &config.bounds.response_time_min,
                               &config.bounds.review_score, &config.bounds.proximity_km}) {
    if (!(b->min < b->max)) fail("recommender bounds must satisfy min < max");
  }
}

}  // namespace comprag
