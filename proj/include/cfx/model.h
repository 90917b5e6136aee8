#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfx/dataset.h"

namespace cfx {

// Black-box classifier contract. Implementations must be deterministic and
// free of observable side effects; Predict may be called concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  // Index into the schema's class labels.
  virtual int Predict(const Instance& instance) const = 0;
  virtual std::string name() const = 0;
};

// Continuous features are min-max scaled into one slot; categorical
// features are one-hot over their category set. Layout follows schema order.
class InputEncoder {
 public:
  explicit InputEncoder(const FeatureSchema& schema);

  std::size_t width() const { return width_; }
  std::size_t offset(std::size_t feature) const { return offsets_[feature]; }
  std::vector<double> Encode(const Instance& instance) const;

 private:
  std::vector<FeatureSpec> specs_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
};

inline constexpr std::size_t kHiddenUnits = 25;

// Weights of a one-hidden-layer network, all row-major.
struct MlpParameters {
  std::size_t inputs = 0;
  std::size_t hidden = kHiddenUnits;
  std::size_t outputs = 0;
  std::vector<double> hidden_weights;  // inputs x hidden
  std::vector<double> hidden_bias;     // hidden
  std::vector<double> output_weights;  // hidden x outputs
  std::vector<double> output_bias;     // outputs

  static MlpParameters Zeros(std::size_t inputs, std::size_t hidden,
                             std::size_t outputs);
  std::size_t size() const;
  std::vector<double> Flatten() const;
  void Assign(std::span<const double> flat);

  friend bool operator==(const MlpParameters&, const MlpParameters&) = default;
};

// Mean softmax cross-entropy over the batch (ReLU hidden layer). When
// `gradient` is non-null it receives d(loss)/d(parameters) in the same shape.
double CrossEntropyLoss(const MlpParameters& params,
                        std::span<const std::vector<double>> inputs,
                        std::span<const int> labels,
                        MlpParameters* gradient = nullptr);

// Output logits for one encoded input.
std::vector<double> Forward(const MlpParameters& params,
                            std::span<const double> input);

struct MlpHyperparams {
  int epochs = 200;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

class MlpModel final : public Predictor {
 public:
  MlpModel(FeatureSchema schema, MlpParameters params);

  int Predict(const Instance& instance) const override;
  std::string name() const override { return "mlp-relu-h25"; }

  std::vector<double> Logits(const Instance& instance) const;

  const FeatureSchema& schema() const { return schema_; }
  const InputEncoder& encoder() const { return encoder_; }
  const MlpParameters& parameters() const { return params_; }

  // Bookkeeping filled in by TrainMlp and carried through save/load.
  double training_accuracy = 0.0;
  double final_loss = 0.0;
  MlpHyperparams hyperparams;

 private:
  FeatureSchema schema_;
  InputEncoder encoder_;
  MlpParameters params_;
};

// Full-batch gradient descent from a seeded Glorot-uniform initialization.
// Throws DataError on single-class or empty data, TrainingError when the
// loss becomes non-finite.
MlpModel TrainMlp(const Dataset& data, const MlpHyperparams& hyperparams);

double Accuracy(const Predictor& model, const Dataset& data);
// Frequency of the most common label.
double MajorityBaseline(const Dataset& data);

nlohmann::json ModelToJson(const MlpModel& model);
MlpModel ModelFromJson(const nlohmann::json& j);
void SaveModel(const MlpModel& model, const std::string& path);
MlpModel LoadModel(const std::string& path);

}  // namespace cfx
