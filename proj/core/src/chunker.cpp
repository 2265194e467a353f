#include "comprag/chunker.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "comprag/errors.hpp"
#include "comprag/hash.hpp"

namespace comprag {
namespace {

using nlohmann::json;

std::size_t max_chunk_tokens(const ChunkingConfig& cfg) {
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(cfg.target_size) * (1.0 + cfg.tolerance) + 1e-9));
}

void check_inputs(const Document& doc, const ChunkingConfig& cfg) {
  if (doc.doc_id.empty()) throw std::invalid_argument("document doc_id must be non-empty");
  if (doc.text.empty()) throw std::invalid_argument("document text must be non-empty");
  if (cfg.target_size < 1) throw std::invalid_argument("chunking target_size must be >= 1");
  if (!(cfg.tolerance >= 0.0 && cfg.tolerance <= 1.0)) {
    throw std::invalid_argument("chunking tolerance must lie in [0, 1]");
  }
}

std::string trim_ascii(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string single_line(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

struct RecordLine {
  std::string text;
  std::string property_key;  // empty for free-text lines
  std::size_t tokens = 0;
};

struct ParsedRecord {
  std::string object_key;
  std::map<std::string, std::string> properties;
  std::vector<RecordLine> lines;
};

ParsedRecord parse_record(std::string_view raw, std::size_t line_no) {
  const auto fail = [line_no](const std::string& why) -> void {
    throw MalformedRecord("record at line " + std::to_string(line_no) + ": " + why);
  };

  const json rec = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (rec.is_discarded()) fail("not valid JSON");
  if (!rec.is_object()) fail("not a JSON object");

  ParsedRecord out;
  if (!rec.contains("object_key") || !rec["object_key"].is_string()) {
    fail("missing object_key delimiter");
  }
  out.object_key = rec["object_key"].get<std::string>();
  if (out.object_key.empty()) fail("object_key is empty");

  if (!rec.contains("properties") || !rec["properties"].is_object()) {
    fail("missing properties object");
  }
  for (const auto& [key, value] : rec["properties"].items()) {
    if (!value.is_string()) fail("property '" + key + "' is not a string");
    out.properties[key] = value.get<std::string>();
  }
  if (out.properties.empty()) fail("record has an empty property list");

  std::string free_text;
  if (rec.contains("text")) {
    if (!rec["text"].is_string()) fail("text is not a string");
    free_text = rec["text"].get<std::string>();
  }

  // One line per property (key-sorted via std::map), then the free text,
  // split at newlines. Lines are the indivisible split atoms.
  for (const auto& [key, value] : out.properties) {
    RecordLine line;
    line.text = trim_ascii(key + ": " + single_line(value));
    line.property_key = key;
    out.lines.push_back(std::move(line));
  }
  size_t start = 0;
  while (start <= free_text.size() && !free_text.empty()) {
    size_t nl = free_text.find('\n', start);
    std::string_view piece =
        nl == std::string::npos
            ? std::string_view(free_text).substr(start)
            : std::string_view(free_text).substr(start, nl - start);
    std::string trimmed = trim_ascii(piece);
    if (!trimmed.empty()) out.lines.push_back(RecordLine{std::move(trimmed), "", 0});
    if (nl == std::string::npos) break;
    start = nl + 1;
  }

  for (RecordLine& line : out.lines) line.tokens = whitespace_tokens(line.text).size();
  return out;
}

std::vector<ChunkObject> chunk_record(const ParsedRecord& rec, const ChunkingConfig& cfg,
                                      const std::string& doc_id) {
  const std::size_t max_tokens = max_chunk_tokens(cfg);
  for (const RecordLine& line : rec.lines) {
    if (line.tokens > max_tokens) {
      throw OversizedAtom("record '" + rec.object_key + "': line with " +
                          std::to_string(line.tokens) + " tokens exceeds the bound of " +
                          std::to_string(max_tokens));
    }
  }

  // Greedy packing at line boundaries, aiming at target_size.
  std::vector<std::vector<const RecordLine*>> groups;
  std::vector<const RecordLine*> current;
  std::size_t current_tokens = 0;
  for (const RecordLine& line : rec.lines) {
    if (!current.empty() && current_tokens + line.tokens > cfg.target_size) {
      groups.push_back(std::move(current));
      current.clear();
      current_tokens = 0;
    }
    current.push_back(&line);
    current_tokens += line.tokens;
  }
  if (!current.empty()) groups.push_back(std::move(current));

  // The tolerance exists to absorb a pathological tiny trailing chunk.
  if (groups.size() >= 2) {
    const auto tokens_of = [](const std::vector<const RecordLine*>& g) {
      std::size_t n = 0;
      for (const RecordLine* l : g) n += l->tokens;
      return n;
    };
    const std::size_t last = tokens_of(groups.back());
    const std::size_t prev = tokens_of(groups[groups.size() - 2]);
    const std::size_t slack = static_cast<std::size_t>(
        std::floor(cfg.tolerance * static_cast<double>(cfg.target_size) + 1e-9));
    if (last <= slack && prev + last <= max_tokens) {
      auto tail = std::move(groups.back());
      groups.pop_back();
      for (const RecordLine* l : tail) groups.back().push_back(l);
    }
  }

  std::vector<ChunkObject> chunks;
  chunks.reserve(groups.size());
  for (const auto& group : groups) {
    ChunkObject chunk;
    chunk.object_key = rec.object_key;
    chunk.source_doc_id = doc_id;
    for (size_t i = 0; i < group.size(); ++i) {
      if (i > 0) chunk.body += '\n';
      chunk.body += group[i]->text;
      if (!group[i]->property_key.empty()) {
        chunk.properties[group[i]->property_key] = rec.properties.at(group[i]->property_key);
      }
    }
    chunk.token_count = whitespace_tokens(chunk.body).size();
    chunk.hash = assign_hash(chunk.object_key, chunk.body);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

std::vector<ChunkObject> normalize_synthesized(std::vector<ChunkObject> chunks,
                                               const ChunkingConfig& cfg,
                                               const std::string& doc_id) {
  const std::size_t max_tokens = max_chunk_tokens(cfg);
  for (ChunkObject& chunk : chunks) {
    if (chunk.object_key.empty()) {
      throw MalformedRecord("synthesized chunk without an object_key");
    }
    if (chunk.body.empty()) {
      throw MalformedRecord("synthesized chunk for '" + chunk.object_key + "' has an empty body");
    }
    chunk.token_count = whitespace_tokens(chunk.body).size();
    if (chunk.token_count > max_tokens) {
      throw OversizedAtom("synthesized chunk for '" + chunk.object_key + "' has " +
                          std::to_string(chunk.token_count) + " tokens, bound is " +
                          std::to_string(max_tokens));
    }
    chunk.hash = assign_hash(chunk.object_key, chunk.body);
    if (chunk.source_doc_id.empty()) chunk.source_doc_id = doc_id;
  }
  return chunks;
}

}  // namespace

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::vector<ChunkObject> chunk_document(const Document& doc, const ChunkingConfig& cfg,
                                        const ChunkSynthesizer* synthesizer) {
  check_inputs(doc, cfg);

  if (cfg.strategy == ChunkingStrategy::kExternalSynthesizer) {
    if (synthesizer == nullptr) {
      throw ExternalSynthesizerUnavailable(
          "chunking strategy is external_synthesizer but no synthesizer is configured");
    }
    return normalize_synthesized(synthesizer->synthesize(doc, cfg), cfg, doc.doc_id);
  }

  std::vector<ChunkObject> chunks;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= doc.text.size()) {
    size_t nl = doc.text.find('\n', start);
    std::string_view raw = nl == std::string::npos
                               ? std::string_view(doc.text).substr(start)
                               : std::string_view(doc.text).substr(start, nl - start);
    ++line_no;
    const std::string record_text = trim_ascii(raw);
    if (!record_text.empty()) {
      ParsedRecord rec = parse_record(record_text, line_no);
      auto rec_chunks = chunk_record(rec, cfg, doc.doc_id);
      chunks.insert(chunks.end(), std::make_move_iterator(rec_chunks.begin()),
                    std::make_move_iterator(rec_chunks.end()));
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return chunks;
}

std::vector<RelevanceIssue> validate_relevance(const std::vector<ChunkObject>& chunks) {
  std::vector<RelevanceIssue> issues;
  for (const ChunkObject& chunk : chunks) {
    if (chunk.object_key.empty()) {
      issues.push_back({chunk.hash, "empty_object_key", "chunk has no object_key"});
    }
  }
  std::map<std::pair<std::string, std::string>, std::vector<const ChunkObject*>> by_content;
  for (const ChunkObject& chunk : chunks) {
    by_content[{chunk.object_key, chunk.body}].push_back(&chunk);
  }
  for (const auto& [content, group] : by_content) {
    if (group.size() > 1) {
      issues.push_back({group.front()->hash, "duplicate_chunk",
                        std::to_string(group.size()) + " chunks share (object_key, body) for '" +
                            content.first + "'"});
    }
  }
  return issues;
}

}  // namespace comprag
