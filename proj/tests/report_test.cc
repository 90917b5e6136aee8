#include "cfx/report.h"

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "cfx/errors.h"
#include "test_util.h"

namespace cfx {
namespace {

using testing::Car;
using testing::CarModel;
using testing::Drug;
using testing::DrugModel;

const std::vector<Mode> kModes = {Mode{}, Mode{2}, Mode{3}};

std::vector<std::size_t> FirstRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

const RunReport& DrugReport() {
  static const RunReport report =
      RunOnDataset(Drug(), DrugModel(), kModes, 42, {}, 1, FirstRows(20));
  return report;
}

std::size_t CountOf(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(ModeTest, LabelsRoundTrip) {
  EXPECT_EQ(Mode{}.Label(), "unconstrained");
  EXPECT_EQ(Mode{2}.Label(), "k=2");
  for (const Mode& m : kModes) EXPECT_EQ(Mode::Parse(m.Label()), m);
  EXPECT_THROW(Mode::Parse("k=-1"), DataError);
  EXPECT_THROW(Mode::Parse("k=2x"), DataError);
}

TEST(SubSeedTest, DistinctAcrossRowsAndModes) {
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < 100; ++r) {
    for (const Mode& m : kModes) seen.insert(SubSeed(7, r, m));
  }
  EXPECT_EQ(seen.size(), 300u);
  EXPECT_EQ(SubSeed(7, 3, Mode{2}), SubSeed(7, 3, Mode{2}));
  EXPECT_NE(SubSeed(7, 3, Mode{2}), SubSeed(8, 3, Mode{2}));
}

TEST(RunTest, RowsAreIndependentOfSelection) {
  // A row's result depends only on the master seed, the row and the mode.
  const RunReport subset =
      RunOnDataset(Drug(), DrugModel(), kModes, 42, {}, 1, std::vector<std::size_t>{7, 3});
  EXPECT_EQ(subset.rows[0], DrugReport().rows[7]);
  EXPECT_EQ(subset.rows[1], DrugReport().rows[3]);
}

TEST(RunTest, ThreadCountDoesNotChangeResult) {
  const RunReport many =
      RunOnDataset(Drug(), DrugModel(), kModes, 42, {}, 4, FirstRows(20));
  EXPECT_EQ(many, DrugReport());
}

TEST(RunTest, ResultsAreConsistent) {
  for (const RowResult& row : DrugReport().rows) {
    EXPECT_EQ(row.original_label, DrugModel().Predict(row.original));
    ASSERT_EQ(row.modes.size(), kModes.size());
    for (const ModeResult& r : row.modes) {
      if (!r.feasible) continue;
      EXPECT_NE(r.counterfactual_label, row.original_label);
      EXPECT_EQ(r.cardinality, Cardinality(row.original, *r.counterfactual, Drug().schema));
      EXPECT_EQ(r.changed_features.size(), static_cast<std::size_t>(r.cardinality));
      if (r.mode.k) EXPECT_LE(r.cardinality, *r.mode.k);
    }
  }
}

TEST(RunTest, RejectsBadArguments) {
  EXPECT_THROW(RunOnDataset(Drug(), DrugModel(), {}, 1), UsageError);
  EXPECT_THROW(RunOnDataset(Drug(), DrugModel(), kModes, 1, {}, 1,
                            std::vector<std::size_t>{500}),
               UsageError);
  EXPECT_THROW(RunOnDataset(Car(), DrugModel(), kModes, 1), DataError);
}

TEST(AggregateTest, MeansOverFeasibleRows) {
  const RunReport& report = DrugReport();
  for (std::size_t m = 0; m < kModes.size(); ++m) {
    const ModeAggregate& a = report.aggregates[m];
    EXPECT_EQ(a.mode, kModes[m]);
    EXPECT_EQ(a.rows, report.rows.size());
    std::size_t feasible = 0;
    double card = 0;
    for (const RowResult& row : report.rows) {
      if (!row.modes[m].feasible) continue;
      ++feasible;
      card += row.modes[m].cardinality;
    }
    EXPECT_EQ(a.feasible_rows, feasible);
    if (feasible) EXPECT_DOUBLE_EQ(*a.mean_cardinality, card / feasible);
  }
}

TEST(ReportJsonTest, RoundTrip) {
  const RunReport& report = DrugReport();
  const nlohmann::json j = ReportToJson(report);
  EXPECT_EQ(ReportFromJson(j), report);
  EXPECT_EQ(ReportFromJson(nlohmann::json::parse(j.dump())), report);
}

TEST(ReportCsvTest, ShapeAndAggregatesRecomputable) {
  const RunReport& report = DrugReport();
  const auto lines = Lines(ReportToCsv(report));
  const std::size_t body = report.rows.size() * kModes.size();
  ASSERT_EQ(lines.size(), 1 + body + kModes.size());
  for (std::size_t m = 0; m < kModes.size(); ++m) {
    double sum = 0;
    int feasible = 0;
    for (std::size_t i = 1; i <= body; ++i) {
      std::vector<std::string> cells;
      std::stringstream ss(lines[i]);
      for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
      if (cells[1] != kModes[m].Label() || cells[2] != "1") continue;
      ++feasible;
      sum += std::stoi(cells[5]);
    }
    const std::string& agg = lines[1 + body + m];
    EXPECT_EQ(agg.rfind("# mode=" + kModes[m].Label(), 0), 0u);
    if (feasible) {
      EXPECT_NE(agg.find("mean_cardinality=" + FormatDouble(sum / feasible)),
                std::string::npos)
          << agg;
    }
  }
}

TEST(ComparisonTest, LayoutAndMarkers) {
  const RowResult& row = DrugReport().rows[0];
  const std::string text = FormatComparison(row, Drug().schema);
  const auto lines = Lines(text);
  ASSERT_EQ(lines.size(), 2 + kModes.size());
  EXPECT_NE(lines[0].find("Na_to_K"), std::string::npos);
  EXPECT_NE(lines[1].find("Original"), std::string::npos);
  EXPECT_NE(lines[2].find("Unconstrained"), std::string::npos);
  EXPECT_NE(lines[3].find("k=2"), std::string::npos);
  EXPECT_EQ(CountOf(lines[1], "*"), 0u);
  for (std::size_t m = 0; m < kModes.size(); ++m) {
    const ModeResult& r = row.modes[m];
    if (r.feasible) {
      EXPECT_EQ(CountOf(lines[2 + m], "*"), static_cast<std::size_t>(r.cardinality));
    } else {
      EXPECT_EQ(CountOf(lines[2 + m], "infeasible"), Drug().schema.num_features());
    }
  }
}

TEST(ComparisonTest, InfeasibleAndIdenticalRows) {
  RowResult row = DrugReport().rows[0];
  row.original = Drug().instances[95];  // the pinned 16,M,LOW,HIGH row
  row.modes[1].feasible = false;
  ModeResult same = row.modes[0];
  same.counterfactual = row.original;
  same.feasible = true;
  same.cardinality = 0;
  row.modes[0] = same;
  const auto lines = Lines(FormatComparison(row, Drug().schema, TableStyle::kCsv));
  EXPECT_EQ(lines[1], "Original,16,M,LOW,HIGH,12.006");
  EXPECT_EQ(CountOf(lines[2], "*"), 0u);
  EXPECT_EQ(lines[3], "k=2,infeasible,infeasible,infeasible,infeasible,infeasible");
}

TEST(ComparisonTest, CarMarkerTotalsShrinkUnderConstraint) {
  const RunReport report =
      RunOnDataset(Car(), CarModel(), {Mode{}, Mode{1}}, 3, {}, 1, FirstRows(30));
  std::size_t free_marks = 0, constrained_marks = 0;
  for (const RowResult& row : report.rows) {
    const auto lines = Lines(FormatComparison(row, Car().schema));
    free_marks += CountOf(lines[2], "*");
    constrained_marks += CountOf(lines[3], "*");
    EXPECT_LE(CountOf(lines[3], "*"), 1u);
  }
  EXPECT_GE(free_marks, constrained_marks);
}

}  // namespace
}  // namespace cfx
