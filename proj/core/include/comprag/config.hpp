#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "comprag/chunker.hpp"
#include "comprag/evaluator.hpp"
#include "comprag/recommender.hpp"

namespace comprag {

struct EmbedderConfig {
  std::size_t dim = 256;
  std::string mode = "local";  // "local" | "remote"
  std::string remote_url;      // mode=remote; COMPRAG_EMBED_URL is the fallback
};

struct GeneratorConfig {
  std::string mode = "template";  // "template" | "remote"
  std::string remote_url;         // mode=remote; COMPRAG_GEN_URL is the fallback
};

struct PathsConfig {
  std::filesystem::path index_file = "comprag.idx";
  std::filesystem::path filtration_file = "filtration.json";
};

/// Everything the CLI needs, from one TOML-style file (comprag.toml by
/// default). Unknown keys are rejected.
struct PipelineConfig {
  EmbedderConfig embedder;
  ChunkingConfig chunking;
  EvaluatorPolicy evaluator;
  std::size_t query_k = 8;
  MetricWeights weights;
  MetricBounds bounds;
  GeneratorConfig generator;
  PathsConfig paths;
};

/// Parses the TOML-style key/value format: [section] headers, key = value
/// pairs (strings, numbers, booleans), # comments. Throws ConfigError with
/// the offending line on any problem, including unknown keys.
PipelineConfig parse_config(std::string_view toml_text, std::string_view origin = "<config>");

PipelineConfig load_config(const std::filesystem::path& path);

/// Cross-field validation (weight sums, bound ordering, enum values, ...).
void validate_config(const PipelineConfig& config);

}  // namespace comprag
