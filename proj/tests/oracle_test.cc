#include "cfx/oracle.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "cfx/errors.h"
#include "cfx/ga.h"
#include "test_util.h"

namespace cfx {
namespace {

using testing::Car;
using testing::CarModel;
using testing::Drug;
using testing::DrugModel;

TEST(GridTest, CarGridIsEveryCategory) {
  const CandidateGrid grid = BuildGrid(Car());
  ASSERT_EQ(grid.values.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(grid.values[i].size(), Car().schema.feature(i).categories.size());
  }
}

TEST(GridTest, ContinuousGridIsSortedObservedValues) {
  const CandidateGrid grid = BuildGrid(Drug());
  const auto& age = grid.values[0];
  EXPECT_TRUE(std::is_sorted(age.begin(), age.end()));
  EXPECT_EQ(std::adjacent_find(age.begin(), age.end()), age.end());
  EXPECT_EQ(age.front(), Drug().schema.feature(0).min);
  EXPECT_EQ(age.back(), Drug().schema.feature(0).max);
}

TEST(EnumerationTest, CarSingleChangeCount) {
  const CandidateGrid grid = BuildGrid(Car());
  const Instance& x = Car().instances[0];
  // Domains of sizes 4,4,4,3,3,3: one fewer alternative each.
  EXPECT_EQ(EnumerationSize(x, Car().schema, 1, grid), 15u);
  const OracleResult r = ExhaustiveBest(x, CarModel(), Car().schema, 1, grid);
  EXPECT_EQ(r.evaluated, 15u);
  // Every other point of the product space.
  EXPECT_EQ(EnumerationSize(x, Car().schema, std::nullopt, grid), 1727u);
  EXPECT_EQ(EnumerationSize(x, Car().schema, 0, grid), 0u);
}

TEST(OracleTest, ZeroBudgetFindsNothing) {
  const CandidateGrid grid = BuildGrid(Car());
  const OracleResult r = ExhaustiveBest(Car().instances[0], CarModel(), Car().schema, 0, grid);
  EXPECT_FALSE(r.best.has_value());
  EXPECT_EQ(r.evaluated, 0u);
}

TEST(OracleTest, BudgetExceededIsThrown) {
  const CandidateGrid grid = BuildGrid(Drug());
  try {
    ExhaustiveBest(Drug().instances[0], DrugModel(), Drug().schema, std::nullopt, grid,
                   1000);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.budget(), 1000u);
    EXPECT_EQ(e.required(),
              EnumerationSize(Drug().instances[0], Drug().schema, std::nullopt, grid));
  }
}

// The car data set is the whole product space, so scanning its rows is an
// independent brute force over the same candidates.
TEST(OracleTest, MatchesBruteForceOnCar) {
  const FeatureSchema& s = Car().schema;
  const CandidateGrid grid = BuildGrid(Car());
  for (std::size_t r = 0; r < Car().instances.size(); r += 97) {
    const Instance& x = Car().instances[r];
    const int label = CarModel().Predict(x);
    for (int k = 1; k <= 3; ++k) {
      double best = 1e300;
      for (const Instance& y : Car().instances) {
        const int card = Cardinality(x, y, s);
        if (card == 0 || card > k || CarModel().Predict(y) == label) continue;
        best = std::min(best, Distance(x, y, s).total);
      }
      const OracleResult o = ExhaustiveBest(x, CarModel(), s, k, grid);
      if (best == 1e300) {
        EXPECT_FALSE(o.best.has_value()) << "row " << r << " k " << k;
        continue;
      }
      ASSERT_TRUE(o.best.has_value()) << "row " << r << " k " << k;
      EXPECT_EQ(o.distance, best);
      EXPECT_LE(o.cardinality, k);
      EXPECT_EQ(o.cardinality, Cardinality(x, *o.best, s));
      EXPECT_NE(CarModel().Predict(*o.best), label);
    }
  }
}

TEST(OracleTest, DistanceNonincreasingInK) {
  const CandidateGrid grid = BuildGrid(Car());
  for (std::size_t r = 0; r < Car().instances.size(); r += 131) {
    const Instance& x = Car().instances[r];
    std::optional<double> previous;
    for (int k = 1; k <= 6; ++k) {
      const OracleResult o = ExhaustiveBest(x, CarModel(), Car().schema, k, grid);
      if (previous) {
        ASSERT_TRUE(o.best.has_value());
        EXPECT_LE(o.distance, *previous);
      }
      if (o.best) previous = o.distance;
    }
  }
}

TEST(OracleTest, GaNeverBeatsOracle) {
  const FeatureSchema& s = Car().schema;
  const CandidateGrid grid = BuildGrid(Car());
  for (std::size_t r = 5; r < Car().instances.size(); r += 173) {
    const Instance& x = Car().instances[r];
    const OracleResult o = ExhaustiveBest(x, CarModel(), s, 2, grid);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const GaOutcome ga = GenerateCounterfactual(x, CarModel(), s, 2, seed);
      if (!ga.feasible) continue;
      ASSERT_TRUE(o.best.has_value());
      EXPECT_GE(ga.best->raw_distance, o.distance);
    }
  }
}

TEST(OracleTest, DrugSmallBudgetSearch) {
  const FeatureSchema& s = Drug().schema;
  const CandidateGrid grid = BuildGrid(Drug());
  const Instance& x = Drug().instances[0];
  const OracleResult o = ExhaustiveBest(x, DrugModel(), s, 2, grid);
  EXPECT_EQ(o.evaluated, EnumerationSize(x, s, 2, grid));
  if (o.best) {
    EXPECT_NE(DrugModel().Predict(*o.best), DrugModel().Predict(x));
    EXPECT_LE(o.cardinality, 2);
    EXPECT_EQ(o.distance, Distance(x, *o.best, s).total);
  }
}

}  // namespace
}  // namespace cfx
