// Command-line driver: train the reference MLP, generate counterfactual
// reports, and spot-check single rows against the exhaustive oracle.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfx/dataset.h"
#include "cfx/errors.h"
#include "cfx/metrics.h"
#include "cfx/model.h"
#include "cfx/oracle.h"
#include "cfx/report.h"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kBudget = 3 };

struct DataArgs {
  std::string data;
  std::string target;
  std::vector<std::string> categorical;
  std::vector<std::string> continuous;

  cfx::LoadOptions load() const {
    cfx::LoadOptions options;
    for (const auto& c : categorical) options.forced_kinds[c] = cfx::FeatureKind::kCategorical;
    for (const auto& c : continuous) options.forced_kinds[c] = cfx::FeatureKind::kContinuous;
    return options;
  }
};

void AddDataOptions(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.data, "CSV file with a header row")->required();
  cmd->add_option("--target", args.target, "Name of the class column")->required();
  cmd->add_option("--categorical", args.categorical,
                  "Force a column to be categorical (repeatable)");
  cmd->add_option("--continuous", args.continuous,
                  "Force a column to be continuous (repeatable)");
}

cfx::MlpModel TrainOrLoad(const cfx::Dataset& data,
                          const std::optional<std::string>& model_in,
                          const cfx::MlpHyperparams& hp) {
  if (model_in) {
    cfx::MlpModel model = cfx::LoadModel(*model_in);
    if (!(model.schema() == data.schema)) {
      throw cfx::DataError("model '" + *model_in + "' was trained on a different schema");
    }
    return model;
  }
  return cfx::TrainMlp(data, hp);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cardinality-constrained counterfactual explanations for tabular classifiers"};
  app.require_subcommand(1);

  DataArgs data_args;
  cfx::MlpHyperparams hp;
  std::optional<std::string> model_in;
  std::uint64_t seed = 0;

  // generate
  auto* generate = app.add_subcommand("generate", "Generate counterfactuals for every row");
  AddDataOptions(generate, data_args);
  std::vector<int> ks;
  bool constrained_only = false;
  cfx::GaOverrides overrides;
  std::string out_path;
  std::string format = "json";
  int threads = 0;
  std::vector<std::size_t> show_rows;
  generate->add_option("--k", ks, "Cardinality bound; repeat for several modes");
  generate->add_flag("--constrained-only", constrained_only,
                     "Skip the unconstrained mode");
  generate->add_option("--seed", seed, "Master seed")->required();
  generate->add_option("--pop", overrides.population_size, "Population size");
  generate->add_option("--gens", overrides.generations, "Generations");
  generate->add_option("--pm", overrides.mutation_probability, "Mutation probability");
  generate->add_option("--pc", overrides.crossover_probability, "Crossover probability");
  generate->add_option("--out", out_path, "Report path")->required();
  generate->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  generate->add_option("--model-in", model_in, "Reuse a saved model instead of training");
  generate->add_option("--epochs", hp.epochs, "Training epochs");
  generate->add_option("--lr", hp.learning_rate, "Training learning rate");
  generate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  std::string scale = "raw";
  generate->add_option("--scale", scale, "Continuous distance scaling: raw or minmax")
      ->check(CLI::IsMember({"raw", "minmax"}));
  generate->add_option("--show-row", show_rows,
                       "Print the comparison table for this row (repeatable)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive best counterfactual for one row");
  AddDataOptions(oracle, data_args);
  std::size_t row = 0;
  std::optional<int> oracle_k;
  std::uint64_t budget = cfx::kDefaultOracleBudget;
  oracle->add_option("--row", row, "Row index")->required();
  oracle->add_option("--k", oracle_k, "Cardinality bound (omit for none)");
  oracle->add_option("--budget", budget, "Maximum predictor calls");
  oracle->add_option("--model-in", model_in, "Reuse a saved model instead of training");
  oracle->add_option("--seed", seed, "Training seed");
  std::string oracle_scale = "raw";
  oracle->add_option("--scale", oracle_scale, "Continuous distance scaling: raw or minmax")
      ->check(CLI::IsMember({"raw", "minmax"}));

  // train
  auto* train = app.add_subcommand("train", "Train the reference MLP and save it");
  AddDataOptions(train, data_args);
  std::string model_out;
  train->add_option("--model-out", model_out, "Output JSON path")->required();
  train->add_option("--seed", seed, "Training seed");
  train->add_option("--epochs", hp.epochs, "Training epochs");
  train->add_option("--lr", hp.learning_rate, "Training learning rate");

  // schema
  auto* schema_cmd = app.add_subcommand("schema", "Print the inferred schema as JSON");
  AddDataOptions(schema_cmd, data_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (generate->parsed()) {
      cfx::ExperimentOptions options;
      options.data_path = data_args.data;
      options.target = data_args.target;
      options.load = data_args.load();
      if (!constrained_only) options.modes.push_back({});
      for (int k : ks) {
        if (k < 0) throw cfx::UsageError("--k must be >= 0");
        options.modes.push_back({k});
      }
      options.seed = seed;
      options.overrides = overrides;
      options.model_in = model_in;
      options.training = hp;
      options.threads = threads;
      options.scale = cfx::ParseScale(scale);
      const cfx::RunReport report = cfx::RunExperiment(options);
      cfx::ExportReport(report, cfx::ParseReportFormat(format), out_path);

      for (const cfx::ModeAggregate& a : report.aggregates) {
        std::cout << a.mode.Label() << ": feasible " << a.feasible_rows << "/"
                  << a.rows << ", mean cardinality "
                  << (a.mean_cardinality ? cfx::FormatDouble(*a.mean_cardinality) : "NA")
                  << '\n';
      }
      for (std::size_t r : show_rows) {
        auto it = std::find_if(report.rows.begin(), report.rows.end(),
                               [&](const cfx::RowResult& rr) { return rr.row == r; });
        if (it == report.rows.end()) throw cfx::UsageError("--show-row out of range");
        std::cout << "\nrow " << r << '\n' << cfx::FormatComparison(*it, report.schema);
      }
    } else if (oracle->parsed()) {
      const cfx::Dataset data = cfx::LoadCsv(data_args.data, data_args.target, data_args.load());
      if (row >= data.instances.size()) throw cfx::UsageError("--row out of range");
      hp.seed = seed;
      const cfx::MlpModel model = TrainOrLoad(data, model_in, hp);
      const cfx::Instance& x = data.instances[row];
      const cfx::OracleResult result =
          cfx::ExhaustiveBest(x, model, data.schema, oracle_k, cfx::BuildGrid(data), budget,
                              cfx::ParseScale(oracle_scale));
      nlohmann::json j = {
          {"row", row},
          {"original", data.schema.FormatInstance(x)},
          {"original_label", data.schema.class_labels()[model.Predict(x)]},
          {"evaluated", result.evaluated},
      };
      if (result.best) {
        j["counterfactual"] = data.schema.FormatInstance(*result.best);
        j["counterfactual_label"] = data.schema.class_labels()[model.Predict(*result.best)];
        j["distance"] = result.distance;
        j["cardinality"] = result.cardinality;
      } else {
        j["counterfactual"] = nullptr;
      }
      std::cout << j.dump(1) << '\n';
    } else if (train->parsed()) {
      const cfx::Dataset data = cfx::LoadCsv(data_args.data, data_args.target, data_args.load());
      hp.seed = seed;
      const cfx::MlpModel model = cfx::TrainMlp(data, hp);
      cfx::SaveModel(model, model_out);
      std::cout << "training accuracy " << model.training_accuracy
                << " (majority baseline " << cfx::MajorityBaseline(data) << ")\n";
    } else if (schema_cmd->parsed()) {
      const cfx::Dataset data = cfx::LoadCsv(data_args.data, data_args.target, data_args.load());
      std::cout << cfx::SchemaToJson(data.schema).dump(1) << '\n';
    }
  } catch (const cfx::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const cfx::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
