#include "cfx/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "cfx/errors.h"

namespace cfx {
namespace {

std::optional<double> ParseFiniteDouble(std::string_view text) {
  // from_chars rejects leading whitespace and '+'; trim the former.
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string Quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view KindName(FeatureKind kind) {
  return kind == FeatureKind::kContinuous ? "continuous" : "categorical";
}

FeatureKind ParseKind(std::string_view name) {
  if (name == "continuous") return FeatureKind::kContinuous;
  if (name == "categorical") return FeatureKind::kCategorical;
  throw DataError("unknown feature kind '" + std::string(name) + "'");
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features,
                             std::string target_name,
                             std::vector<std::string> class_labels)
    : features_(std::move(features)),
      target_name_(std::move(target_name)),
      class_labels_(std::move(class_labels)) {
  if (features_.empty()) throw DataError("dataset has no feature columns");
  std::set<std::string_view> names;
  for (const FeatureSpec& f : features_) {
    if (!names.insert(f.name).second) {
      throw DataError("duplicate feature name '" + f.name + "'");
    }
    if (f.name == target_name_) {
      throw DataError("target '" + target_name_ + "' is also a feature");
    }
    if (f.is_continuous()) {
      if (!(f.min <= f.max) || !std::isfinite(f.min) || !std::isfinite(f.max)) {
        throw DataError("feature '" + f.name + "' has an invalid range");
      }
    } else {
      if (f.categories.empty()) {
        throw DataError("feature '" + f.name + "' has no categories");
      }
      if (std::adjacent_find(f.categories.begin(), f.categories.end(),
                             std::greater_equal<>()) != f.categories.end()) {
        throw DataError("categories of '" + f.name +
                        "' must be sorted and unique");
      }
    }
  }
  std::set<std::string_view> labels(class_labels_.begin(), class_labels_.end());
  if (labels.size() != class_labels_.size()) {
    throw DataError("duplicate class labels");
  }
  if (class_labels_.size() < 2) {
    throw DataError("target '" + target_name_ +
                    "' has fewer than two classes; no counterfactual exists");
  }
}

std::size_t FeatureSchema::num_continuous() const {
  return std::count_if(features_.begin(), features_.end(),
                       [](const FeatureSpec& f) { return f.is_continuous(); });
}

std::size_t FeatureSchema::num_categorical() const {
  return features_.size() - num_continuous();
}

std::optional<std::size_t> FeatureSchema::FindFeature(
    std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

int FeatureSchema::ClassIndex(std::string_view label) const {
  auto it = std::find(class_labels_.begin(), class_labels_.end(), label);
  if (it == class_labels_.end()) {
    throw DataError("unknown class label '" + std::string(label) + "'");
  }
  return static_cast<int>(it - class_labels_.begin());
}

double FeatureSchema::ParseValue(std::size_t feature,
                                 std::string_view text) const {
  const FeatureSpec& spec = features_.at(feature);
  if (spec.is_continuous()) {
    auto value = ParseFiniteDouble(text);
    if (!value) {
      throw DataError("feature '" + spec.name + "': '" + std::string(text) +
                      "' is not a finite number");
    }
    return *value;
  }
  auto it = std::lower_bound(spec.categories.begin(), spec.categories.end(),
                             text);
  if (it == spec.categories.end() || *it != text) {
    throw DataError("feature '" + spec.name + "': '" + std::string(text) +
                    "' is not in the category set");
  }
  return static_cast<double>(it - spec.categories.begin());
}

std::string FeatureSchema::FormatValue(std::size_t feature,
                                       double value) const {
  const FeatureSpec& spec = features_.at(feature);
  if (spec.is_continuous()) return FormatDouble(value);
  return spec.categories.at(static_cast<std::size_t>(value));
}

Instance FeatureSchema::ParseInstance(
    std::span<const std::string> cells) const {
  if (cells.size() != features_.size()) {
    throw DataError("expected " + std::to_string(features_.size()) +
                    " values, got " + std::to_string(cells.size()));
  }
  std::vector<double> values(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    values[i] = ParseValue(i, cells[i]);
  }
  return Instance(std::move(values));
}

std::vector<std::string> FeatureSchema::FormatInstance(
    const Instance& instance) const {
  std::vector<std::string> cells;
  cells.reserve(instance.size());
  for (std::size_t i = 0; i < instance.size(); ++i) {
    cells.push_back(FormatValue(i, instance[i]));
  }
  return cells;
}

void FeatureSchema::Validate(const Instance& instance) const {
  if (instance.size() != features_.size()) {
    throw DataError("instance has " + std::to_string(instance.size()) +
                    " values, schema has " + std::to_string(features_.size()));
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const double v = instance[i];
    if (!std::isfinite(v)) {
      throw DataError("feature '" + features_[i].name + "' is not finite");
    }
    if (features_[i].is_categorical()) {
      const auto n = static_cast<double>(features_[i].categories.size());
      if (v < 0 || v >= n || v != std::floor(v)) {
        throw DataError("feature '" + features_[i].name +
                        "' has a value outside its category set");
      }
    }
  }
}

FeatureKind InferKind(std::span<const std::string> column_values) {
  for (const std::string& cell : column_values) {
    if (cell.empty()) continue;
    if (!ParseFiniteDouble(cell)) return FeatureKind::kCategorical;
  }
  return FeatureKind::kContinuous;
}

double Normalize(double value, const FeatureSpec& spec) {
  if (spec.max == spec.min) return 0.0;
  return (value - spec.min) / (spec.max - spec.min);
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  cells.push_back(std::move(cell));
  return cells;
}

Dataset ParseCsv(std::istream& in, std::string_view target_name,
                 const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV has no header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = SplitCsvLine(line);

  auto target_it = std::find(header.begin(), header.end(), target_name);
  if (target_it == header.end()) {
    throw DataError("target column '" + std::string(target_name) +
                    "' not in header");
  }
  const std::size_t target_col = target_it - header.begin();
  if (header.size() == 1) {
    throw DataError("dataset has no feature columns");
  }
  for (const auto& [name, kind] : options.forced_kinds) {
    if (std::find(header.begin(), header.end(), name) == header.end() ||
        name == target_name) {
      throw DataError("cannot force kind of unknown column '" + name + "'");
    }
  }

  // Column-major text cells; the target column is kept separately.
  const std::size_t num_features = header.size() - 1;
  std::vector<std::vector<std::string>> columns(num_features);
  std::vector<std::string> targets;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " columns, header has " +
                      std::to_string(header.size()));
    }
    for (std::size_t c = 0, f = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        throw DataError("line " + std::to_string(line_no) + ": missing value in '" +
                        header[c] + "'");
      }
      if (c == target_col) {
        targets.push_back(std::move(cells[c]));
      } else {
        columns[f++].push_back(std::move(cells[c]));
      }
    }
  }
  if (targets.empty()) throw DataError("dataset has no rows");

  std::vector<FeatureSpec> specs;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_col) names.push_back(header[c]);
  }
  for (std::size_t f = 0; f < num_features; ++f) {
    FeatureSpec spec;
    spec.name = names[f];
    auto forced = options.forced_kinds.find(spec.name);
    spec.kind = forced != options.forced_kinds.end() ? forced->second
                                                     : InferKind(columns[f]);
    if (spec.is_continuous()) {
      spec.min = std::numeric_limits<double>::infinity();
      spec.max = -spec.min;
      for (const std::string& cell : columns[f]) {
        auto v = ParseFiniteDouble(cell);
        if (!v) {
          throw DataError("column '" + spec.name + "' forced continuous but '" +
                          cell + "' is not a number");
        }
        spec.min = std::min(spec.min, *v);
        spec.max = std::max(spec.max, *v);
      }
    } else {
      std::set<std::string> distinct(columns[f].begin(), columns[f].end());
      spec.categories.assign(distinct.begin(), distinct.end());
    }
    specs.push_back(std::move(spec));
  }

  std::set<std::string> distinct_labels(targets.begin(), targets.end());
  Dataset dataset;
  dataset.schema = FeatureSchema(
      std::move(specs), std::string(target_name),
      std::vector<std::string>(distinct_labels.begin(), distinct_labels.end()));

  const std::size_t rows = targets.size();
  dataset.instances.reserve(rows);
  dataset.labels.reserve(rows);
  std::vector<double> values(num_features);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t f = 0; f < num_features; ++f) {
      values[f] = dataset.schema.ParseValue(f, columns[f][r]);
    }
    dataset.instances.emplace_back(values);
    dataset.labels.push_back(dataset.schema.ClassIndex(targets[r]));
  }
  return dataset;
}

Dataset LoadCsv(const std::string& path, std::string_view target_name,
                const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return ParseCsv(in, target_name, options);
}

void WriteCsv(const Dataset& dataset, std::ostream& out) {
  const FeatureSchema& schema = dataset.schema;
  for (const FeatureSpec& f : schema.features()) out << Quote(f.name) << ',';
  out << Quote(schema.target_name()) << '\n';
  for (std::size_t r = 0; r < dataset.instances.size(); ++r) {
    for (const std::string& cell : schema.FormatInstance(dataset.instances[r])) {
      out << Quote(cell) << ',';
    }
    out << Quote(schema.class_labels()[dataset.labels[r]]) << '\n';
  }
}

nlohmann::json SchemaToJson(const FeatureSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const FeatureSpec& f : schema.features()) {
    nlohmann::json j = {{"name", f.name}, {"kind", KindName(f.kind)}};
    if (f.is_continuous()) {
      j["domain"] = {f.min, f.max};
    } else {
      j["domain"] = f.categories;
    }
    features.push_back(std::move(j));
  }
  return {{"features", std::move(features)},
          {"target", schema.target_name()},
          {"class_labels", schema.class_labels()}};
}

FeatureSchema SchemaFromJson(const nlohmann::json& j) {
  try {
    std::vector<FeatureSpec> specs;
    for (const auto& jf : j.at("features")) {
      FeatureSpec spec;
      spec.name = jf.at("name").get<std::string>();
      spec.kind = ParseKind(jf.at("kind").get<std::string>());
      if (spec.is_continuous()) {
        spec.min = jf.at("domain").at(0).get<double>();
        spec.max = jf.at("domain").at(1).get<double>();
      } else {
        spec.categories = jf.at("domain").get<std::vector<std::string>>();
      }
      specs.push_back(std::move(spec));
    }
    return FeatureSchema(std::move(specs), j.at("target").get<std::string>(),
                         j.at("class_labels").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema JSON: ") + e.what());
  }
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace cfx
