#include "cfx/oracle.h"

#include <algorithm>
#include <limits>
#include <set>

#include "cfx/errors.h"
#include "cfx/metrics.h"

namespace cfx {
namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t SatAdd(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::uint64_t SatMul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

// Grid values for feature i other than x's own value.
std::vector<std::vector<double>> Alternatives(const Instance& x,
                                              const FeatureSchema& schema,
                                              const CandidateGrid& grid) {
  if (grid.values.size() != schema.num_features()) {
    throw UsageError("candidate grid does not match the schema");
  }
  std::vector<std::vector<double>> alt(schema.num_features());
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    for (double v : grid.values[i]) {
      if (ValuesDiffer(schema.feature(i), x[i], v)) alt[i].push_back(v);
    }
  }
  return alt;
}

}  // namespace

CandidateGrid BuildGrid(const Dataset& data) {
  const FeatureSchema& schema = data.schema;
  CandidateGrid grid;
  grid.values.resize(schema.num_features());
  for (std::size_t i = 0; i < schema.num_features(); ++i) {
    const FeatureSpec& spec = schema.feature(i);
    if (spec.is_categorical()) {
      for (std::size_t c = 0; c < spec.categories.size(); ++c) {
        grid.values[i].push_back(static_cast<double>(c));
      }
    } else {
      std::set<double> seen;
      for (const Instance& row : data.instances) seen.insert(row[i]);
      grid.values[i].assign(seen.begin(), seen.end());
    }
  }
  return grid;
}

std::uint64_t EnumerationSize(const Instance& x, const FeatureSchema& schema,
                              std::optional<int> k, const CandidateGrid& grid) {
  const auto alt = Alternatives(x, schema, grid);
  const std::size_t n = schema.num_features();
  const std::size_t max_changed =
      k ? std::min<std::size_t>(static_cast<std::size_t>(std::max(*k, 0)), n) : n;
  // by_size[j] = sum over j-subsets of the product of alternative counts.
  std::vector<std::uint64_t> by_size(n + 1, 0);
  by_size[0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = std::min(i + 1, n); j >= 1; --j) {
      by_size[j] = SatAdd(by_size[j], SatMul(by_size[j - 1], alt[i].size()));
    }
  }
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= max_changed; ++j) total = SatAdd(total, by_size[j]);
  return total;
}

OracleResult ExhaustiveBest(const Instance& x, const Predictor& model,
                            const FeatureSchema& schema, std::optional<int> k,
                            const CandidateGrid& grid, std::uint64_t budget,
                            ContinuousScale scale) {
  schema.Validate(x);
  const std::uint64_t size = EnumerationSize(x, schema, k, grid);
  if (size > budget) throw BudgetExceeded(size, budget);

  const auto alt = Alternatives(x, schema, grid);
  const int n = static_cast<int>(schema.num_features());
  const int max_changed = k ? std::min(std::max(*k, 0), n) : n;
  const int original_label = model.Predict(x);

  OracleResult result;
  Instance candidate = x;
  std::vector<int> subset;
  std::vector<std::size_t> digit;

  auto consider = [&](int cardinality) {
    ++result.evaluated;
    if (model.Predict(candidate) == original_label) return;
    const double d = Distance(x, candidate, schema, scale).total;
    const bool better =
        !result.best || d < result.distance ||
        (d == result.distance &&
         (cardinality < result.cardinality ||
          (cardinality == result.cardinality && candidate < *result.best)));
    if (better) {
      result.best = candidate;
      result.distance = d;
      result.cardinality = cardinality;
    }
  };

  for (int size_changed = 1; size_changed <= max_changed; ++size_changed) {
    // Subsets in lexicographic order.
    subset.resize(size_changed);
    for (int j = 0; j < size_changed; ++j) subset[j] = j;
    while (true) {
      bool empty = false;
      for (int f : subset) empty |= alt[f].empty();
      if (!empty) {
        // Odometer over the alternatives of the chosen features.
        digit.assign(size_changed, 0);
        while (true) {
          for (int j = 0; j < size_changed; ++j) {
            candidate[subset[j]] = alt[subset[j]][digit[j]];
          }
          consider(size_changed);
          int pos = size_changed - 1;
          while (pos >= 0 && ++digit[pos] == alt[subset[pos]].size()) {
            digit[pos] = 0;
            --pos;
          }
          if (pos < 0) break;
        }
        for (int f : subset) candidate[f] = x[f];
      }
      int pos = size_changed - 1;
      while (pos >= 0 && subset[pos] == n - size_changed + pos) --pos;
      if (pos < 0) break;
      ++subset[pos];
      for (int j = pos + 1; j < size_changed; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  return result;
}

}  // namespace cfx
