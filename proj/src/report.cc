#include "cfx/report.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cfx/errors.h"

namespace cfx {
namespace {

using nlohmann::json;

json OptionalToJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> OptionalFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json InstanceToJson(const Instance& x, const FeatureSchema& schema) {
  return schema.FormatInstance(x);
}

Instance InstanceFromJson(const json& j, const FeatureSchema& schema) {
  return schema.ParseInstance(j.get<std::vector<std::string>>());
}

std::string Join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string CsvCell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

ModeResult RunMode(const Instance& x, const MlpModel& model,
                   const FeatureSchema& schema, const Mode& mode,
                   GaConfig config, std::uint64_t seed) {
  config.seed = seed;
  config.penalty.k = mode.k;
  const GaOutcome outcome = Evolve(x, model, schema, config);

  ModeResult result;
  result.mode = mode;
  result.feasible = outcome.feasible;
  result.evaluations = outcome.evaluations;
  if (outcome.best) {
    const Individual& best = *outcome.best;
    result.counterfactual = best.values;
    result.counterfactual_label = best.label;
    result.cardinality = best.cardinality;
    result.raw_distance = best.raw_distance;
    for (std::size_t i = 0; i < schema.num_features(); ++i) {
      if (ValuesDiffer(schema.feature(i), x[i], best.values[i])) {
        result.changed_features.push_back(schema.feature(i).name);
      }
    }
  }
  return result;
}

}  // namespace

std::string Mode::Label() const {
  return k ? "k=" + std::to_string(*k) : "unconstrained";
}

Mode Mode::Parse(const std::string& label) {
  if (label == "unconstrained") return {};
  if (label.rfind("k=", 0) == 0) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(label.substr(2), &used);
      if (used == label.size() - 2 && k >= 0) return {k};
    } catch (const std::exception&) {
    }
  }
  throw DataError("unknown mode '" + label + "'");
}

std::uint64_t SubSeed(std::uint64_t master, std::size_t row, const Mode& mode) {
  const std::uint64_t mode_key =
      mode.k ? static_cast<std::uint64_t>(*mode.k) + 1 : 0;
  return CombineSeeds(CombineSeeds(master, row), mode_key);
}

GaConfig ApplyOverrides(GaConfig config, const GaOverrides& o) {
  if (o.population_size) config.population_size = *o.population_size;
  if (o.generations) config.generations = *o.generations;
  if (o.mutation_probability) config.mutation_probability = *o.mutation_probability;
  if (o.crossover_probability) config.crossover_probability = *o.crossover_probability;
  if (o.scale) config.penalty.scale = *o.scale;
  if (config.elitism_count >= config.population_size) {
    config.elitism_count = config.population_size - 1;
  }
  return config;
}

std::vector<ModeAggregate> Aggregate(const std::vector<RowResult>& rows,
                                     const std::vector<Mode>& modes) {
  std::vector<ModeAggregate> out;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    ModeAggregate agg;
    agg.mode = modes[m];
    double card_sum = 0.0, dist_sum = 0.0;
    for (const RowResult& row : rows) {
      const ModeResult& r = row.modes.at(m);
      ++agg.rows;
      if (!r.feasible) continue;
      ++agg.feasible_rows;
      card_sum += r.cardinality;
      dist_sum += r.raw_distance;
    }
    agg.feasibility_rate =
        agg.rows ? static_cast<double>(agg.feasible_rows) / agg.rows : 0.0;
    if (agg.feasible_rows) {
      agg.mean_cardinality = card_sum / agg.feasible_rows;
      agg.mean_raw_distance = dist_sum / agg.feasible_rows;
    }
    out.push_back(agg);
  }
  return out;
}

RunReport RunOnDataset(const Dataset& data, const MlpModel& model,
                       const std::vector<Mode>& modes, std::uint64_t seed,
                       const GaOverrides& overrides, int threads,
                       std::optional<std::vector<std::size_t>> rows) {
  if (modes.empty()) throw UsageError("at least one mode is required");
  if (!(model.schema() == data.schema)) {
    throw DataError("model schema does not match the dataset");
  }
  const FeatureSchema& schema = data.schema;
  GaConfig base = ApplyOverrides(DefaultGaConfig(schema, std::nullopt, 0),
                                 overrides);
  base.penalty = PenaltyConfig::ForSchema(schema, std::nullopt, base.penalty.scale);
  base.Validate();

  std::vector<std::size_t> selected;
  if (rows) {
    selected = *rows;
    for (std::size_t r : selected) {
      if (r >= data.instances.size()) {
        throw UsageError("row " + std::to_string(r) + " is out of range");
      }
    }
  } else {
    selected.resize(data.instances.size());
    for (std::size_t r = 0; r < selected.size(); ++r) selected[r] = r;
  }

  RunReport report;
  report.schema = schema;
  report.ga = base;
  report.seed = seed;
  report.model = {model.name(),
                  "trained",
                  model.training_accuracy,
                  model.hyperparams.epochs,
                  model.hyperparams.learning_rate,
                  model.hyperparams.seed};
  report.rows.resize(selected.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      try {
        const std::size_t r = selected[i];
        RowResult& out = report.rows[i];
        out.row = r;
        out.original = data.instances[r];
        out.dataset_label = data.labels[r];
        out.original_label = model.Predict(out.original);
        for (const Mode& mode : modes) {
          out.modes.push_back(RunMode(out.original, model, schema, mode, base,
                                      SubSeed(seed, r, mode)));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::size_t>(workers, std::max<std::size_t>(1, selected.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  report.aggregates = Aggregate(report.rows, modes);
  return report;
}

RunReport RunExperiment(const ExperimentOptions& options) {
  const Dataset data = LoadCsv(options.data_path, options.target, options.load);
  std::string source = "trained";
  MlpModel model = [&] {
    if (options.model_in) {
      source = *options.model_in;
      return LoadModel(*options.model_in);
    }
    MlpHyperparams hp = options.training;
    hp.seed = options.seed;
    return TrainMlp(data, hp);
  }();
  GaOverrides overrides = options.overrides;
  if (!overrides.scale) overrides.scale = options.scale;
  RunReport report = RunOnDataset(data, model, options.modes, options.seed,
                                  overrides, options.threads);
  report.dataset = options.data_path;
  report.model.source = source;
  return report;
}

std::string FormatComparison(const RowResult& row, const FeatureSchema& schema,
                             TableStyle style, const std::string& marker) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {""};
  for (const FeatureSpec& f : schema.features()) header.push_back(f.name);
  table.push_back(header);

  std::vector<std::string> original = {"Original"};
  for (const std::string& cell : schema.FormatInstance(row.original)) {
    original.push_back(cell);
  }
  table.push_back(original);

  for (const ModeResult& r : row.modes) {
    std::vector<std::string> line = {r.mode.k ? r.mode.Label() : "Unconstrained"};
    if (!r.feasible || !r.counterfactual) {
      line.resize(header.size(), "infeasible");
    } else {
      for (std::size_t i = 0; i < schema.num_features(); ++i) {
        std::string cell = schema.FormatValue(i, (*r.counterfactual)[i]);
        if (ValuesDiffer(schema.feature(i), row.original[i], (*r.counterfactual)[i])) {
          cell += marker;
        }
        line.push_back(std::move(cell));
      }
    }
    table.push_back(std::move(line));
  }

  std::ostringstream out;
  if (style == TableStyle::kCsv) {
    for (const auto& line : table) {
      std::vector<std::string> cells;
      for (const auto& c : line) cells.push_back(CsvCell(c));
      out << Join(cells, ',') << '\n';
    }
    return out.str();
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      width[c] = std::max(width[c], line[c].size());
    }
  }
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      out << std::string(width[c] - line[c].size(), ' ') << line[c];
    }
    out << '\n';
  }
  return out.str();
}

ReportFormat ParseReportFormat(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw UsageError("unknown report format '" + name + "'");
}

json ReportToJson(const RunReport& report) {
  const FeatureSchema& schema = report.schema;
  json rows = json::array();
  for (const RowResult& row : report.rows) {
    json modes = json::array();
    for (const ModeResult& r : row.modes) {
      json jm = {{"mode", r.mode.Label()},
                 {"feasible", r.feasible},
                 {"cardinality", r.cardinality},
                 {"raw_distance", r.raw_distance},
                 {"changed_features", r.changed_features},
                 {"evaluations", r.evaluations}};
      if (r.counterfactual) {
        jm["counterfactual"] = InstanceToJson(*r.counterfactual, schema);
        jm["counterfactual_label"] = schema.class_labels().at(r.counterfactual_label);
      } else {
        jm["counterfactual"] = nullptr;
        jm["counterfactual_label"] = nullptr;
      }
      modes.push_back(std::move(jm));
    }
    rows.push_back({{"row", row.row},
                    {"original", InstanceToJson(row.original, schema)},
                    {"original_label", schema.class_labels().at(row.original_label)},
                    {"dataset_label", schema.class_labels().at(row.dataset_label)},
                    {"modes", std::move(modes)}});
  }
  json aggregates = json::array();
  for (const ModeAggregate& a : report.aggregates) {
    aggregates.push_back({{"mode", a.mode.Label()},
                          {"rows", a.rows},
                          {"feasible_rows", a.feasible_rows},
                          {"feasibility_rate", a.feasibility_rate},
                          {"mean_cardinality", OptionalToJson(a.mean_cardinality)},
                          {"mean_raw_distance", OptionalToJson(a.mean_raw_distance)}});
  }
  const GaConfig& ga = report.ga;
  return {
      {"dataset", report.dataset},
      {"schema", SchemaToJson(schema)},
      {"model",
       {{"name", report.model.name},
        {"source", report.model.source},
        {"training_accuracy", report.model.training_accuracy},
        {"epochs", report.model.epochs},
        {"learning_rate", report.model.learning_rate},
        {"seed", report.model.seed}}},
      {"ga",
       {{"population_size", ga.population_size},
        {"generations", ga.generations},
        {"mutation_probability", ga.mutation_probability},
        {"crossover_probability", ga.crossover_probability},
        {"tournament_size", ga.tournament_size},
        {"elitism_count", ga.elitism_count},
        {"c_card", ga.penalty.c_card},
        {"scale", ScaleName(ga.penalty.scale)}}},
      {"seed", report.seed},
      {"rows", std::move(rows)},
      {"aggregates", std::move(aggregates)},
  };
}

RunReport ReportFromJson(const json& j) {
  try {
    RunReport report;
    report.dataset = j.at("dataset").get<std::string>();
    report.schema = SchemaFromJson(j.at("schema"));
    const FeatureSchema& schema = report.schema;
    const json& m = j.at("model");
    report.model = {m.at("name").get<std::string>(),
                    m.at("source").get<std::string>(),
                    m.at("training_accuracy").get<double>(),
                    m.at("epochs").get<int>(),
                    m.at("learning_rate").get<double>(),
                    m.at("seed").get<std::uint64_t>()};
    const json& g = j.at("ga");
    report.ga.population_size = g.at("population_size").get<int>();
    report.ga.generations = g.at("generations").get<int>();
    report.ga.mutation_probability = g.at("mutation_probability").get<double>();
    report.ga.crossover_probability = g.at("crossover_probability").get<double>();
    report.ga.tournament_size = g.at("tournament_size").get<int>();
    report.ga.elitism_count = g.at("elitism_count").get<int>();
    report.ga.penalty.c_card = g.at("c_card").get<double>();
    report.ga.penalty.scale = ParseScale(g.at("scale").get<std::string>());
    report.seed = j.at("seed").get<std::uint64_t>();

    for (const json& jr : j.at("rows")) {
      RowResult row;
      row.row = jr.at("row").get<std::size_t>();
      row.original = InstanceFromJson(jr.at("original"), schema);
      row.original_label = schema.ClassIndex(jr.at("original_label").get<std::string>());
      row.dataset_label = schema.ClassIndex(jr.at("dataset_label").get<std::string>());
      for (const json& jm : jr.at("modes")) {
        ModeResult r;
        r.mode = Mode::Parse(jm.at("mode").get<std::string>());
        r.feasible = jm.at("feasible").get<bool>();
        r.cardinality = jm.at("cardinality").get<int>();
        r.raw_distance = jm.at("raw_distance").get<double>();
        r.changed_features = jm.at("changed_features").get<std::vector<std::string>>();
        r.evaluations = jm.at("evaluations").get<std::int64_t>();
        if (!jm.at("counterfactual").is_null()) {
          r.counterfactual = InstanceFromJson(jm.at("counterfactual"), schema);
          r.counterfactual_label =
              schema.ClassIndex(jm.at("counterfactual_label").get<std::string>());
        }
        row.modes.push_back(std::move(r));
      }
      report.rows.push_back(std::move(row));
    }
    for (const json& ja : j.at("aggregates")) {
      ModeAggregate a;
      a.mode = Mode::Parse(ja.at("mode").get<std::string>());
      a.rows = ja.at("rows").get<std::size_t>();
      a.feasible_rows = ja.at("feasible_rows").get<std::size_t>();
      a.feasibility_rate = ja.at("feasibility_rate").get<double>();
      a.mean_cardinality = OptionalFromJson(ja.at("mean_cardinality"));
      a.mean_raw_distance = OptionalFromJson(ja.at("mean_raw_distance"));
      report.aggregates.push_back(a);
    }
    return report;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string ReportToCsv(const RunReport& report) {
  const FeatureSchema& schema = report.schema;
  std::ostringstream out;
  std::vector<std::string> header = {"row", "mode", "feasible", "original_label",
                                     "counterfactual_label", "cardinality",
                                     "raw_distance", "changed_features"};
  for (const FeatureSpec& f : schema.features()) header.push_back(CsvCell(f.name));
  out << Join(header, ',') << '\n';
  for (const RowResult& row : report.rows) {
    for (const ModeResult& r : row.modes) {
      std::vector<std::string> cells = {
          std::to_string(row.row),
          r.mode.Label(),
          r.feasible ? "1" : "0",
          CsvCell(schema.class_labels().at(row.original_label)),
          r.counterfactual ? CsvCell(schema.class_labels().at(r.counterfactual_label))
                           : "",
          std::to_string(r.cardinality),
          FormatDouble(r.raw_distance),
          CsvCell(Join(r.changed_features, ';'))};
      for (std::size_t i = 0; i < schema.num_features(); ++i) {
        cells.push_back(r.counterfactual
                            ? CsvCell(schema.FormatValue(i, (*r.counterfactual)[i]))
                            : "");
      }
      out << Join(cells, ',') << '\n';
    }
  }
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string("NA");
  };
  for (const ModeAggregate& a : report.aggregates) {
    out << "# mode=" << a.mode.Label() << ",rows=" << a.rows
        << ",feasible_rows=" << a.feasible_rows
        << ",feasibility_rate=" << FormatDouble(a.feasibility_rate)
        << ",mean_cardinality=" << opt(a.mean_cardinality)
        << ",mean_raw_distance=" << opt(a.mean_raw_distance) << '\n';
  }
  return out.str();
}

void ExportReport(const RunReport& report, ReportFormat format,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  if (format == ReportFormat::kJson) {
    out << ReportToJson(report).dump(1) << '\n';
  } else {
    out << ReportToCsv(report);
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace cfx
