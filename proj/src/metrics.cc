#include "cfx/metrics.h"

#include <algorithm>
#include <cmath>

#include "cfx/errors.h"

namespace cfx {
namespace {

void CheckWidths(const Instance& x, const Instance& y,
                 const FeatureSchema& schema) {
  if (x.size() != schema.num_features() || y.size() != schema.num_features()) {
    throw DataError("instance width does not match the schema");
  }
}

}  // namespace

std::string_view ScaleName(ContinuousScale scale) {
  return scale == ContinuousScale::kMinMax ? "minmax" : "raw";
}

ContinuousScale ParseScale(std::string_view name) {
  if (name == "minmax") return ContinuousScale::kMinMax;
  if (name == "raw") return ContinuousScale::kRaw;
  throw UsageError("unknown scale '" + std::string(name) + "'");
}

PenaltyConfig PenaltyConfig::ForSchema(const FeatureSchema& schema,
                                       std::optional<int> k,
                                       ContinuousScale scale) {
  if (k && *k < 0) throw UsageError("cardinality bound k must be >= 0");
  return {k, 10.0 * MaxDistance(schema, scale) + 10.0, scale};
}

double MaxDistance(const FeatureSchema& schema, ContinuousScale scale) {
  double total = 0.0;
  for (const FeatureSpec& spec : schema.features()) {
    if (spec.is_categorical()) {
      total += 1.0;
    } else if (scale == ContinuousScale::kMinMax) {
      // Constant columns normalize to 0 everywhere but still count one unit.
      total += 1.0;
    } else {
      total += spec.max - spec.min;
    }
  }
  return total;
}

bool ValuesDiffer(const FeatureSpec& spec, double a, double b) {
  if (spec.is_categorical()) return a != b;
  // Scaled by the larger magnitude so the test is symmetric.
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) > kEqualityTolerance * scale;
}

DistanceBreakdown Distance(const Instance& x, const Instance& y,
                           const FeatureSchema& schema, ContinuousScale scale) {
  CheckWidths(x, y, schema);
  DistanceBreakdown d;
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    const FeatureSpec& spec = schema.feature(i);
    if (spec.is_continuous()) {
      d.continuous_part +=
          scale == ContinuousScale::kMinMax
              ? std::abs(Normalize(x[i], spec) - Normalize(y[i], spec))
              : std::abs(x[i] - y[i]);
    } else if (x[i] != y[i]) {
      d.categorical_part += 1.0;
    }
  }
  d.total = d.continuous_part + d.categorical_part;
  return d;
}

int Cardinality(const Instance& x, const Instance& y,
                const FeatureSchema& schema) {
  CheckWidths(x, y, schema);
  int count = 0;
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    count += ValuesDiffer(schema.feature(i), x[i], y[i]);
  }
  return count;
}

double CardPenalty(int cardinality, const PenaltyConfig& config) {
  if (!config.k) return 0.0;
  const int excess = std::max(0, cardinality - *config.k);
  return config.c_card * static_cast<double>(excess);
}

double ValidityPenalty(const FeatureSchema& schema,
                       const PenaltyConfig& config) {
  return config.c_card * static_cast<double>(schema.num_features() + 1);
}

double ScoreFrom(double raw_distance, int cardinality, bool label_flipped,
                 const FeatureSchema& schema, const PenaltyConfig& config) {
  double score = raw_distance + CardPenalty(cardinality, config);
  if (!label_flipped) score += ValidityPenalty(schema, config);
  return score;
}

double Score(const Instance& x, const Instance& candidate, int candidate_label,
             int original_label, const FeatureSchema& schema,
             const PenaltyConfig& config) {
  return ScoreFrom(Distance(x, candidate, schema, config.scale).total,
                   Cardinality(x, candidate, schema),
                   candidate_label != original_label, schema, config);
}

}  // namespace cfx
