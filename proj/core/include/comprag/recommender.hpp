#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "comprag/filtration.hpp"

namespace comprag {

/// Raw out-of-model metrics for one object.
struct MetricRecord {
  std::string object_key;
  double nps = 0.0;                // [-100, 100]
  double response_time_min = 0.0;  // > 0, minutes; lower is better
  double review_score = 0.0;       // [0, 5]
  double proximity_km = 0.0;       // >= 0; lower is better
};

/// Nonnegative weights summing to 1.
struct MetricWeights {
  double w_nps = 0.25;
  double w_time = 0.25;
  double w_review = 0.25;
  double w_prox = 0.25;
};

struct MetricBound {
  double min = 0.0;
  double max = 1.0;
};

struct MetricBounds {
  MetricBound nps{-100.0, 100.0};
  MetricBound response_time_min{10.0, 60.0};
  MetricBound review_score{0.0, 5.0};
  MetricBound proximity_km{0.0, 10.0};
};

/// Desirability index in [0, 1]: weighted sum of clamped min-max normalized
/// metrics, with response time and proximity inverted (lower is better).
/// Throws InvalidBounds when any bound has min >= max.
double desirability(const MetricRecord& record, const MetricWeights& weights,
                    const MetricBounds& bounds);

/// Scores every record and assembles the sorted filtration list.
/// Throws DuplicateKey (canonically colliding object keys), InvalidBounds.
FiltrationList build_filtration(const std::vector<MetricRecord>& records,
                                const MetricWeights& weights, const MetricBounds& bounds);

/// CSV with header: object_key,nps,response_time_min,review_score,proximity_km
/// Throws MalformedRecord naming the missing column or bad field.
std::vector<MetricRecord> parse_metrics_csv(std::string_view csv_text);
std::vector<MetricRecord> load_metrics_csv(const std::filesystem::path& path);

}  // namespace comprag
