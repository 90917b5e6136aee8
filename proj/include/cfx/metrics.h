#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "cfx/dataset.h"

namespace cfx {

// Relative tolerance under which two continuous values count as equal.
inline constexpr double kEqualityTolerance = 1e-9;

// How continuous differences enter the distance: min-max normalized by the
// observed range, or as raw absolute differences.
enum class ContinuousScale { kMinMax, kRaw };

std::string_view ScaleName(ContinuousScale scale);
ContinuousScale ParseScale(std::string_view name);

struct DistanceBreakdown {
  double continuous_part = 0.0;   // sum of |normalized differences|
  double categorical_part = 0.0;  // number of category mismatches
  double total = 0.0;
};

// Scoring settings. An absent k means unconstrained search.
struct PenaltyConfig {
  std::optional<int> k;
  double c_card = 0.0;
  ContinuousScale scale = ContinuousScale::kMinMax;

  // c_card = 10 * MaxDistance + 10 (10 * #features + 10 under min-max), so
  // one unit of excess cardinality outweighs any distance difference between
  // in-domain candidates.
  static PenaltyConfig ForSchema(
      const FeatureSchema& schema, std::optional<int> k = std::nullopt,
      ContinuousScale scale = ContinuousScale::kMinMax);

  friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

bool ValuesDiffer(const FeatureSpec& spec, double a, double b);

// L1 over min-max normalized continuous features plus matching distance
// over categorical features.
DistanceBreakdown Distance(const Instance& x, const Instance& y,
                           const FeatureSchema& schema,
                           ContinuousScale scale = ContinuousScale::kMinMax);

// Largest distance between two instances inside the schema's domains.
double MaxDistance(const FeatureSchema& schema, ContinuousScale scale);

// Number of features where x and y differ.
int Cardinality(const Instance& x, const Instance& y,
                const FeatureSchema& schema);

// c_card * max(0, card - k); zero when unconstrained.
double CardPenalty(int cardinality, const PenaltyConfig& config);

// Penalty added when the candidate keeps the original label:
// c_card * (#features + 1), above any cardinality penalty plus distance.
double ValidityPenalty(const FeatureSchema& schema, const PenaltyConfig& config);

// Lower is better. Candidates that flip the label and respect the cardinality
// budget score their raw distance exactly.
double Score(const Instance& x, const Instance& candidate, int candidate_label,
             int original_label, const FeatureSchema& schema,
             const PenaltyConfig& config);

// Same, from precomputed distance and cardinality.
double ScoreFrom(double raw_distance, int cardinality, bool label_flipped,
                 const FeatureSchema& schema, const PenaltyConfig& config);

}  // namespace cfx
