#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cfx {

enum class FeatureKind { kContinuous, kCategorical };

std::string_view KindName(FeatureKind kind);
FeatureKind ParseKind(std::string_view name);

// Column metadata. Continuous features carry the observed [min, max];
// categorical features carry their sorted, duplicate-free category set.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::string> categories;

  bool is_continuous() const { return kind == FeatureKind::kContinuous; }
  bool is_categorical() const { return kind == FeatureKind::kCategorical; }

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// One row of feature values aligned to a schema. Continuous cells hold the
// raw value; categorical cells hold the index of the category in
// FeatureSpec::categories.
class Instance {
 public:
  Instance() = default;
  explicit Instance(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  int category(std::size_t i) const { return static_cast<int>(values_[i]); }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const Instance&, const Instance&) = default;
  friend auto operator<=>(const Instance&, const Instance&) = default;

 private:
  std::vector<double> values_;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws DataError if the invariants (unique names, target not a feature,
  // at least two classes, non-empty sorted category sets, min <= max) fail.
  FeatureSchema(std::vector<FeatureSpec> features, std::string target_name,
                std::vector<std::string> class_labels);

  std::size_t num_features() const { return features_.size(); }
  std::size_t num_classes() const { return class_labels_.size(); }
  std::size_t num_continuous() const;
  std::size_t num_categorical() const;

  const FeatureSpec& feature(std::size_t i) const { return features_[i]; }
  std::span<const FeatureSpec> features() const { return features_; }
  const std::string& target_name() const { return target_name_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }

  std::optional<std::size_t> FindFeature(std::string_view name) const;
  // Index of a class label; throws DataError if unknown.
  int ClassIndex(std::string_view label) const;

  // Cell conversions between text and the Instance encoding.
  double ParseValue(std::size_t feature, std::string_view text) const;
  std::string FormatValue(std::size_t feature, double value) const;
  Instance ParseInstance(std::span<const std::string> cells) const;
  std::vector<std::string> FormatInstance(const Instance& instance) const;

  // Throws DataError when the instance has the wrong width, a categorical
  // code outside its domain or a non-finite continuous value.
  void Validate(const Instance& instance) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<FeatureSpec> features_;
  std::string target_name_;
  std::vector<std::string> class_labels_;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<Instance> instances;
  std::vector<int> labels;  // indices into schema.class_labels()
};

struct LoadOptions {
  // Overrides the syntactic kind inference for the named columns.
  std::map<std::string, FeatureKind, std::less<>> forced_kinds;
};

// Continuous iff every cell parses as a finite real number.
FeatureKind InferKind(std::span<const std::string> column_values);

// Min-max scaling; 0 for constant columns.
double Normalize(double value, const FeatureSpec& spec);

// Splits one CSV record. Handles quoted fields with doubled quotes.
std::vector<std::string> SplitCsvLine(std::string_view line);

Dataset ParseCsv(std::istream& in, std::string_view target_name,
                 const LoadOptions& options = {});
Dataset LoadCsv(const std::string& path, std::string_view target_name,
                const LoadOptions& options = {});

// Writes the dataset back out, target column last.
void WriteCsv(const Dataset& dataset, std::ostream& out);

nlohmann::json SchemaToJson(const FeatureSchema& schema);
FeatureSchema SchemaFromJson(const nlohmann::json& j);

// Shortest text that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace cfx
