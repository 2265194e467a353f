// comprag - comparative retrieval pipeline CLI
//
// Subcommands: ingest (records -> index), score (metrics -> filtration),
// query (question -> answer with evidence), inspect (correlation dump).
//
// Exit codes: 0 success; 1 relevance violations (ingest); 2 bad input,
// missing files or configuration; 3 remote service failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "comprag/config.hpp"
#include "comprag/errors.hpp"
#include "comprag/pipeline.hpp"

namespace {

using namespace comprag;

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitRemoteFailure = 3;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

PipelineConfig load_effective_config(const std::string& config_flag) {
  if (!config_flag.empty()) return load_config(config_flag);
  if (std::filesystem::exists("comprag.toml")) return load_config("comprag.toml");
  return parse_config("", "<defaults>");
}

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value ? value : "";
}

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& cfg) {
  if (cfg.embedder.mode == "remote") {
    std::string url = cfg.embedder.remote_url;
    if (url.empty()) url = env_or_empty("COMPRAG_EMBED_URL");
    if (url.empty()) {
      throw ConfigError(
          "embedder.mode is 'remote' but neither embedder.remote_url nor COMPRAG_EMBED_URL is "
          "set");
    }
    return std::make_unique<RemoteEmbedder>(url, cfg.embedder.dim);
  }
  return std::make_unique<HashingTfEmbedder>(cfg.embedder.dim);
}

std::unique_ptr<Generator> make_generator(const PipelineConfig& cfg) {
  if (cfg.generator.mode == "remote") {
    std::string url = cfg.generator.remote_url;
    if (url.empty()) url = env_or_empty("COMPRAG_GEN_URL");
    if (url.empty()) {
      throw ConfigError(
          "generator.mode is 'remote' but neither generator.remote_url nor COMPRAG_GEN_URL is "
          "set");
    }
    return std::make_unique<RemoteGenerator>(url);
  }
  return std::make_unique<TemplateGenerator>();
}

int cmd_ingest(const std::string& config_flag, const std::string& records_path,
               const std::string& out_flag, bool allow_violations) {
  const PipelineConfig cfg = load_effective_config(config_flag);

  Document doc;
  doc.doc_id = std::filesystem::path(records_path).filename().string();
  doc.text = read_text_file(records_path);

  std::vector<ChunkObject> chunks = chunk_document(doc, cfg.chunking);
  const auto issues = validate_relevance(chunks);

  std::cout << "chunks: " << chunks.size() << "\n";
  std::cout << "violations: " << issues.size() << "\n";
  for (const RelevanceIssue& issue : issues) {
    std::cout << "  [" << issue.rule << "] " << issue.chunk_hash << " " << issue.detail << "\n";
  }
  if (!issues.empty() && !allow_violations) {
    std::cerr << "error: relevance violations present (use --allow-violations to proceed)\n";
    return kExitViolations;
  }
  if (!issues.empty()) {
    // exclude the violating chunks so the index invariants still hold
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<ChunkObject> kept;
    for (ChunkObject& chunk : chunks) {
      if (chunk.object_key.empty()) continue;
      if (!seen.insert({chunk.object_key, chunk.body}).second) continue;
      kept.push_back(std::move(chunk));
    }
    std::cout << "kept: " << kept.size() << "\n";
    chunks = std::move(kept);
  }

  const auto embedder = make_embedder(cfg);
  const CorpusIndex index = build_index(chunks, *embedder);
  const std::filesystem::path out = out_flag.empty() ? cfg.paths.index_file : out_flag;
  save_index(index, out);
  std::cout << "index: " << out.string() << "\n";
  return kExitOk;
}

int cmd_score(const std::string& config_flag, const std::string& metrics_path,
              const std::string& out_flag) {
  const PipelineConfig cfg = load_effective_config(config_flag);
  const auto records = load_metrics_csv(metrics_path);
  const FiltrationList flist = build_filtration(records, cfg.weights, cfg.bounds);
  const std::filesystem::path out = out_flag.empty() ? cfg.paths.filtration_file : out_flag;
  save_filtration(flist, out);
  std::cout << "entries: " << flist.size() << "\n";
  std::cout << "filtration: " << out.string() << "\n";
  return kExitOk;
}

int cmd_query(const std::string& config_flag, const std::string& query_text,
              std::optional<std::size_t> k_flag, const std::string& mode_flag,
              std::optional<double> alpha_flag, std::optional<std::size_t> cutoff_flag,
              const std::string& index_flag, const std::string& filtration_flag, bool as_json) {
  PipelineConfig cfg = load_effective_config(config_flag);

  QueryRequest request;
  request.query_text = query_text;
  request.k = k_flag.value_or(cfg.query_k);
  request.policy = cfg.evaluator;
  if (!mode_flag.empty()) {
    // reuse the config-file vocabulary for the flag values
    cfg.evaluator.mode = parse_config("[evaluator]\nmode = \"" + mode_flag + "\"\n").evaluator.mode;
    request.policy.mode = cfg.evaluator.mode;
  }
  if (alpha_flag) request.policy.alpha = *alpha_flag;
  if (cutoff_flag) {
    request.policy.cutoff_m =
        *cutoff_flag == 0 ? std::nullopt : std::optional<std::size_t>(*cutoff_flag);
  }

  const std::filesystem::path index_path = index_flag.empty() ? cfg.paths.index_file : index_flag;
  const std::filesystem::path filtration_path =
      filtration_flag.empty() ? cfg.paths.filtration_file : filtration_flag;
  if (!std::filesystem::exists(index_path)) {
    throw Error("index file not found: " + index_path.string() + " (run 'comprag ingest' first)");
  }
  if (!std::filesystem::exists(filtration_path)) {
    throw Error("filtration file not found: " + filtration_path.string() +
                " (run 'comprag score' first)");
  }

  const auto embedder = make_embedder(cfg);
  const CorpusIndex index = load_index(index_path, embedder->fingerprint());
  const FiltrationList flist = ingest_filtration(filtration_path);
  const auto generator = make_generator(cfg);

  const AnswerBundle bundle = answer(index, *embedder, flist, request, *generator);

  if (as_json) {
    std::cout << answer_bundle_to_json(bundle) << "\n";
    return kExitOk;
  }

  std::cout << bundle.answer_text << "\n";
  if (!bundle.evidence.empty()) {
    std::printf("%-4s %-24s %-10s %-10s %-10s %s\n", "rank", "object_key", "semantic", "determ",
                "fused", "hash");
    for (const EvaluatedHit& hit : bundle.evidence) {
      std::printf("%-4zu %-24s %-10.6f %-10.6f %-10.6f %s\n", hit.final_rank,
                  hit.object_key.c_str(), hit.semantic, hit.deterministic, hit.fused,
                  hit.chunk_hash.c_str());
    }
  }
  std::printf("unmatched: %zu chunk(s), %zu filtration key(s)\n",
              bundle.unmatched_report.unmatched_hashes.size(),
              bundle.unmatched_report.unmatched_keys.size());
  std::printf("timings ms: retrieve %.2f, correlate %.2f, evaluate %.2f, generate %.2f\n",
              bundle.timings.retrieve_ms, bundle.timings.correlate_ms,
              bundle.timings.evaluate_ms, bundle.timings.generate_ms);
  return kExitOk;
}

int cmd_inspect(const std::string& config_flag, const std::string& index_flag,
                const std::string& filtration_flag, bool dump_index) {
  const PipelineConfig cfg = load_effective_config(config_flag);
  const std::filesystem::path index_path = index_flag.empty() ? cfg.paths.index_file : index_flag;
  if (!std::filesystem::exists(index_path)) {
    throw Error("index file not found: " + index_path.string());
  }
  const CorpusIndex index = load_index(index_path);  // any fingerprint: inspection only

  if (dump_index) {
    std::cout << export_index_json(index) << "\n";
    return kExitOk;
  }

  const std::filesystem::path filtration_path =
      filtration_flag.empty() ? cfg.paths.filtration_file : filtration_flag;
  if (!std::filesystem::exists(filtration_path)) {
    throw Error("filtration file not found: " + filtration_path.string());
  }
  const FiltrationList flist = ingest_filtration(filtration_path);
  std::cout << correlation_to_json(correlate(index, flist)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"comparative retrieval pipeline: semantic search fused with a deterministic "
               "out-of-model ranking"};
  app.require_subcommand(1);

  std::string config_flag;
  app.add_option("--config", config_flag, "Config file (default: ./comprag.toml if present)");

  auto* ingest = app.add_subcommand("ingest", "Chunk an object-record JSONL file and build the index");
  std::string records_path;
  std::string ingest_out;
  bool allow_violations = false;
  ingest->add_option("records", records_path, "JSONL records file")->required();
  ingest->add_option("--out", ingest_out, "Index output path (default: paths.index)");
  ingest->add_flag("--allow-violations", allow_violations,
                   "Build anyway; violating chunks are excluded from the index");

  auto* score = app.add_subcommand("score", "Score a metrics CSV into a filtration list");
  std::string metrics_path;
  std::string score_out;
  score->add_option("metrics", metrics_path, "Metrics CSV file")->required();
  score->add_option("--out", score_out, "Filtration output path (default: paths.filtration)");

  auto* query = app.add_subcommand("query", "Answer a question over the indexed corpus");
  std::string query_text;
  std::string mode_flag;
  std::string query_index;
  std::string query_filtration;
  std::optional<std::size_t> k_flag;
  std::optional<double> alpha_flag;
  std::optional<std::size_t> cutoff_flag;
  bool as_json = false;
  query->add_option("text", query_text, "Query text")->required();
  query->add_option("--k", k_flag, "Retrieval depth");
  query->add_option("--mode", mode_flag, "Evaluator mode: pass_through | filter | fuse");
  query->add_option("--alpha", alpha_flag, "Fusion weight on semantic similarity, in [0,1]");
  query->add_option("--cutoff", cutoff_flag, "Filtration rank cutoff (0 = unlimited)");
  query->add_flag("--json", as_json, "Emit the full answer bundle as JSON");
  query->add_option("--index", query_index, "Index file (default: paths.index)");
  query->add_option("--filtration", query_filtration, "Filtration file (default: paths.filtration)");

  auto* inspect = app.add_subcommand("inspect", "Dump the hash correlation map as JSON");
  std::string inspect_index;
  std::string inspect_filtration;
  bool dump_index = false;
  inspect->add_option("--index", inspect_index, "Index file (default: paths.index)");
  inspect->add_option("--filtration", inspect_filtration,
                      "Filtration file (default: paths.filtration)");
  inspect->add_flag("--dump-index", dump_index, "Dump the full index as JSON instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(config_flag, records_path, ingest_out, allow_violations);
    }
    if (score->parsed()) {
      return cmd_score(config_flag, metrics_path, score_out);
    }
    if (query->parsed()) {
      return cmd_query(config_flag, query_text, k_flag, mode_flag, alpha_flag, cutoff_flag,
                       query_index, query_filtration, as_json);
    }
    if (inspect->parsed()) {
      return cmd_inspect(config_flag, inspect_index, inspect_filtration, dump_index);
    }
  } catch (const EmbedderUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRemoteFailure;
  } catch (const GeneratorUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRemoteFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
