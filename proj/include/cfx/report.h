#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfx/dataset.h"
#include "cfx/ga.h"
#include "cfx/model.h"

namespace cfx {

// One search setting: unconstrained, or at most k changed features.
struct Mode {
  std::optional<int> k;

  std::string Label() const;
  static Mode Parse(const std::string& label);
  friend bool operator==(const Mode&, const Mode&) = default;
};

struct ModeResult {
  Mode mode;
  bool feasible = false;
  // Best individual found, feasible or not; absent only if none evaluated.
  std::optional<Instance> counterfactual;
  int counterfactual_label = -1;
  int cardinality = 0;
  double raw_distance = 0.0;
  std::vector<std::string> changed_features;
  std::int64_t evaluations = 0;

  friend bool operator==(const ModeResult&, const ModeResult&) = default;
};

struct RowResult {
  std::size_t row = 0;
  Instance original;
  int original_label = -1;  // model prediction, the label to flip
  int dataset_label = -1;
  std::vector<ModeResult> modes;

  friend bool operator==(const RowResult&, const RowResult&) = default;
};

struct ModeAggregate {
  Mode mode;
  std::size_t rows = 0;
  std::size_t feasible_rows = 0;
  double feasibility_rate = 0.0;
  // Over feasible rows only; absent when no row is feasible.
  std::optional<double> mean_cardinality;
  std::optional<double> mean_raw_distance;

  friend bool operator==(const ModeAggregate&, const ModeAggregate&) = default;
};

struct ModelInfo {
  std::string name;
  std::string source;  // "trained" or the path it was loaded from
  double training_accuracy = 0.0;
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelInfo&, const ModelInfo&) = default;
};

struct RunReport {
  std::string dataset;
  FeatureSchema schema;
  ModelInfo model;
  GaConfig ga;  // seed and penalty.k vary per row and mode
  std::uint64_t seed = 0;
  std::vector<RowResult> rows;
  std::vector<ModeAggregate> aggregates;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

struct GaOverrides {
  std::optional<int> population_size;
  std::optional<int> generations;
  std::optional<double> mutation_probability;
  std::optional<double> crossover_probability;
  std::optional<ContinuousScale> scale;
};

// Seed for one (row, mode) search, independent of the other rows and modes.
std::uint64_t SubSeed(std::uint64_t master, std::size_t row, const Mode& mode);

GaConfig ApplyOverrides(GaConfig config, const GaOverrides& overrides);

// Runs every selected row under every mode against the model's own
// prediction. Work is spread over `threads` workers (0 = hardware
// concurrency); the result does not depend on the thread count.
RunReport RunOnDataset(const Dataset& data, const MlpModel& model,
                       const std::vector<Mode>& modes, std::uint64_t seed,
                       const GaOverrides& overrides = {}, int threads = 0,
                       std::optional<std::vector<std::size_t>> rows = std::nullopt);

struct ExperimentOptions {
  std::string data_path;
  std::string target;
  LoadOptions load;
  std::vector<Mode> modes;
  std::uint64_t seed = 0;
  GaOverrides overrides;
  std::optional<std::string> model_in;
  MlpHyperparams training;  // its seed is replaced by `seed`
  int threads = 0;
  // Unscaled L1 by default for experiment runs; see README.
  ContinuousScale scale = ContinuousScale::kRaw;
};

// Loads the data, trains (or loads) the reference MLP and runs all modes.
RunReport RunExperiment(const ExperimentOptions& options);

std::vector<ModeAggregate> Aggregate(const std::vector<RowResult>& rows,
                                     const std::vector<Mode>& modes);

enum class TableStyle { kText, kCsv };

// Original line plus one line per mode, schema column order. Cells that differ
// from the original carry `marker` as a suffix; infeasible modes print
// "infeasible" in every cell.
std::string FormatComparison(const RowResult& row, const FeatureSchema& schema,
                             TableStyle style = TableStyle::kText,
                             const std::string& marker = "*");

enum class ReportFormat { kJson, kCsv };

ReportFormat ParseReportFormat(const std::string& name);

nlohmann::json ReportToJson(const RunReport& report);
RunReport ReportFromJson(const nlohmann::json& j);
// One line per (row, mode) after a header, then aggregate lines prefixed '#'.
std::string ReportToCsv(const RunReport& report);

void ExportReport(const RunReport& report, ReportFormat format,
                  const std::string& path);

}  // namespace cfx
