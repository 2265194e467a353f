#include "comprag/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "comprag/errors.hpp"

namespace comprag {
namespace {

void check_weights(const MetricWeights& w) {
  const double values[] = {w.w_nps, w.w_time, w.w_review, w.w_prox};
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("metric weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("metric weights must sum to 1");
  }
}

void check_bounds(const MetricBounds& b) {
  for (const MetricBound* bound :
       {&b.nps, &b.response_time_min, &b.review_score, &b.proximity_km}) {
    if (!std::isfinite(bound->min) || !std::isfinite(bound->max) || !(bound->min < bound->max)) {
      throw InvalidBounds("metric bounds must satisfy min < max");
    }
  }
}

double clamped_norm(double value, const MetricBound& bound) {
  const double t = (value - bound.min) / (bound.max - bound.min);
  return std::min(1.0, std::max(0.0, t));
}

// Simple CSV: comma-separated, double quotes with "" escapes, no multiline
// fields.
std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < row.size(); ++i) {
    const char c = row[i];
    if (quoted) {
      if (c == '"' && i + 1 < row.size() && row[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_metric(const std::string& field, const std::string& column, size_t line_no,
                    double lo, double hi) {
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    throw MalformedRecord("metrics row " + std::to_string(line_no) + ": column '" + column +
                          "' is not a number: '" + field + "'");
  }
  if (used != field.size() || !std::isfinite(value)) {
    throw MalformedRecord("metrics row " + std::to_string(line_no) + ": column '" + column +
                          "' is not a finite number: '" + field + "'");
  }
  if (value < lo || value > hi) {
    throw MalformedRecord("metrics row " + std::to_string(line_no) + ": column '" + column +
                          "' out of range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "]");
  }
  return value;
}

}  // namespace

double desirability(const MetricRecord& record, const MetricWeights& weights,
                    const MetricBounds& bounds) {
  check_weights(weights);
  check_bounds(bounds);
  return weights.w_nps * clamped_norm(record.nps, bounds.nps) +
         weights.w_time * (1.0 - clamped_norm(record.response_time_min, bounds.response_time_min)) +
         weights.w_review * clamped_norm(record.review_score, bounds.review_score) +
         weights.w_prox * (1.0 - clamped_norm(record.proximity_km, bounds.proximity_km));
}

FiltrationList build_filtration(const std::vector<MetricRecord>& records,
                                const MetricWeights& weights, const MetricBounds& bounds) {
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(records.size());
  for (const MetricRecord& record : records) {
    scored.emplace_back(record.object_key, desirability(record, weights, bounds));
  }
  return make_filtration(std::move(scored));  // DuplicateKey surfaces here
}

std::vector<MetricRecord> parse_metrics_csv(std::string_view csv_text) {
  std::istringstream in{std::string(csv_text)};
  std::string line;
  if (!std::getline(in, line)) throw MalformedRecord("metrics CSV is empty");

  static const std::vector<std::string> kColumns = {
      "object_key", "nps", "response_time_min", "review_score", "proximity_km"};
  const auto header = split_csv_row(line);
  for (const std::string& column : kColumns) {
    if (std::find(header.begin(), header.end(), column) == header.end()) {
      throw MalformedRecord("metrics CSV is missing column '" + column + "'");
    }
  }
  std::vector<size_t> pos;
  for (const std::string& column : kColumns) {
    pos.push_back(static_cast<size_t>(
        std::find(header.begin(), header.end(), column) - header.begin()));
  }

  std::vector<MetricRecord> records;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != header.size()) {
      throw MalformedRecord("metrics row " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    MetricRecord r;
    r.object_key = fields[pos[0]];
    if (r.object_key.empty()) {
      throw MalformedRecord("metrics row " + std::to_string(line_no) + ": empty object_key");
    }
    r.nps = parse_metric(fields[pos[1]], "nps", line_no, -100.0, 100.0);
    r.response_time_min = parse_metric(fields[pos[2]], "response_time_min", line_no,
                                       std::nextafter(0.0, 1.0),
                                       std::numeric_limits<double>::max());
    r.review_score = parse_metric(fields[pos[3]], "review_score", line_no, 0.0, 5.0);
    r.proximity_km = parse_metric(fields[pos[4]], "proximity_km", line_no, 0.0,
                                  std::numeric_limits<double>::max());
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<MetricRecord> load_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open metrics file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_metrics_csv(text);
}

}  // namespace comprag
