#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfx/dataset.h"
#include "cfx/metrics.h"
#include "cfx/model.h"

namespace cfx {

inline constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

// Candidate values per feature: the full category set for categorical
// features, the sorted distinct observed values for continuous ones.
struct CandidateGrid {
  std::vector<std::vector<double>> values;
};

CandidateGrid BuildGrid(const Dataset& data);

struct OracleResult {
  std::optional<Instance> best;
  double distance = 0.0;
  int cardinality = 0;
  std::uint64_t evaluated = 0;  // predictor calls on candidates
};

// Number of candidates differing from x in 1..k features (all features when
// k is absent), each changed feature taking every grid value other than x's.
std::uint64_t EnumerationSize(const Instance& x, const FeatureSchema& schema,
                              std::optional<int> k, const CandidateGrid& grid);

// Minimum-distance label-flipping candidate over the enumeration. Ties go to
// lower cardinality, then to the lexicographically smaller value vector.
// Throws BudgetExceeded when EnumerationSize exceeds `budget`.
OracleResult ExhaustiveBest(const Instance& x, const Predictor& model,
                            const FeatureSchema& schema, std::optional<int> k,
                            const CandidateGrid& grid,
                            std::uint64_t budget = kDefaultOracleBudget,
                            ContinuousScale scale = ContinuousScale::kMinMax);

}  // namespace cfx
