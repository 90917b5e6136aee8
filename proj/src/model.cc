#include "cfx/model.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>

#include "cfx/errors.h"
#include "cfx/random.h"

namespace cfx {
namespace {

// Softmax probabilities from logits, computed stably.
std::vector<double> Softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    p[c] = std::exp(logits[c] - top);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

int ArgMax(std::span<const double> scores) {
  // First maximum wins: ties go to the lowest class index.
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                          scores.begin());
}

void CheckShape(const MlpParameters& p) {
  if (p.hidden_weights.size() != p.inputs * p.hidden ||
      p.hidden_bias.size() != p.hidden ||
      p.output_weights.size() != p.hidden * p.outputs ||
      p.output_bias.size() != p.outputs) {
    throw DataError("MLP parameter shapes are inconsistent");
  }
}

}  // namespace

InputEncoder::InputEncoder(const FeatureSchema& schema)
    : specs_(schema.features().begin(), schema.features().end()) {
  offsets_.reserve(specs_.size());
  for (const FeatureSpec& spec : specs_) {
    offsets_.push_back(width_);
    width_ += spec.is_continuous() ? 1 : spec.categories.size();
  }
}

std::vector<double> InputEncoder::Encode(const Instance& instance) const {
  if (instance.size() != specs_.size()) {
    throw DataError("instance width does not match the encoder");
  }
  std::vector<double> out(width_, 0.0);
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].is_continuous()) {
      out[offsets_[i]] = Normalize(instance[i], specs_[i]);
    } else {
      const int code = instance.category(i);
      if (code < 0 || static_cast<std::size_t>(code) >= specs_[i].categories.size()) {
        throw DataError("feature '" + specs_[i].name +
                        "' has a value outside its category set");
      }
      out[offsets_[i] + code] = 1.0;
    }
  }
  return out;
}

MlpParameters MlpParameters::Zeros(std::size_t inputs, std::size_t hidden,
                                   std::size_t outputs) {
  MlpParameters p;
  p.inputs = inputs;
  p.hidden = hidden;
  p.outputs = outputs;
  p.hidden_weights.assign(inputs * hidden, 0.0);
  p.hidden_bias.assign(hidden, 0.0);
  p.output_weights.assign(hidden * outputs, 0.0);
  p.output_bias.assign(outputs, 0.0);
  return p;
}

std::size_t MlpParameters::size() const {
  return hidden_weights.size() + hidden_bias.size() + output_weights.size() +
         output_bias.size();
}

std::vector<double> MlpParameters::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto* v :
       {&hidden_weights, &hidden_bias, &output_weights, &output_bias}) {
    flat.insert(flat.end(), v->begin(), v->end());
  }
  return flat;
}

void MlpParameters::Assign(std::span<const double> flat) {
  if (flat.size() != size()) throw UsageError("flat parameter size mismatch");
  auto it = flat.begin();
  for (auto* v : {&hidden_weights, &hidden_bias, &output_weights, &output_bias}) {
    std::copy(it, it + v->size(), v->begin());
    it += v->size();
  }
}

std::vector<double> Forward(const MlpParameters& params,
                            std::span<const double> input) {
  std::vector<double> hidden(params.hidden_bias);
  for (std::size_t i = 0; i < params.inputs; ++i) {
    if (input[i] == 0.0) continue;
    const double* row = &params.hidden_weights[i * params.hidden];
    for (std::size_t h = 0; h < params.hidden; ++h) hidden[h] += input[i] * row[h];
  }
  std::vector<double> logits(params.output_bias);
  for (std::size_t h = 0; h < params.hidden; ++h) {
    const double a = std::max(0.0, hidden[h]);
    if (a == 0.0) continue;
    const double* row = &params.output_weights[h * params.outputs];
    for (std::size_t c = 0; c < params.outputs; ++c) logits[c] += a * row[c];
  }
  return logits;
}

double CrossEntropyLoss(const MlpParameters& params,
                        std::span<const std::vector<double>> inputs,
                        std::span<const int> labels,
                        MlpParameters* gradient) {
  if (inputs.size() != labels.size() || inputs.empty()) {
    throw UsageError("inputs and labels must be non-empty and aligned");
  }
  if (gradient) {
    *gradient = MlpParameters::Zeros(params.inputs, params.hidden, params.outputs);
  }
  const double scale = 1.0 / static_cast<double>(inputs.size());
  double loss = 0.0;
  std::vector<double> pre(params.hidden), act(params.hidden);
  std::vector<double> logits(params.outputs), delta_hidden(params.hidden);

  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const std::vector<double>& x = inputs[n];
    pre = params.hidden_bias;
    for (std::size_t i = 0; i < params.inputs; ++i) {
      if (x[i] == 0.0) continue;
      const double* row = &params.hidden_weights[i * params.hidden];
      for (std::size_t h = 0; h < params.hidden; ++h) pre[h] += x[i] * row[h];
    }
    for (std::size_t h = 0; h < params.hidden; ++h) act[h] = std::max(0.0, pre[h]);
    logits = params.output_bias;
    for (std::size_t h = 0; h < params.hidden; ++h) {
      if (act[h] == 0.0) continue;
      const double* row = &params.output_weights[h * params.outputs];
      for (std::size_t c = 0; c < params.outputs; ++c) logits[c] += act[h] * row[c];
    }
    std::vector<double> prob = Softmax(logits);
    loss -= std::log(std::max(prob[labels[n]], 1e-300)) * scale;
    if (!gradient) continue;

    // d(loss)/d(logits) = p - onehot(y)
    prob[labels[n]] -= 1.0;
    for (double& v : prob) v *= scale;
    for (std::size_t c = 0; c < params.outputs; ++c) gradient->output_bias[c] += prob[c];
    for (std::size_t h = 0; h < params.hidden; ++h) {
      double back = 0.0;
      const double* row = &params.output_weights[h * params.outputs];
      double* grow = &gradient->output_weights[h * params.outputs];
      for (std::size_t c = 0; c < params.outputs; ++c) {
        grow[c] += act[h] * prob[c];
        back += row[c] * prob[c];
      }
      delta_hidden[h] = pre[h] > 0.0 ? back : 0.0;
      gradient->hidden_bias[h] += delta_hidden[h];
    }
    for (std::size_t i = 0; i < params.inputs; ++i) {
      if (x[i] == 0.0) continue;
      double* grow = &gradient->hidden_weights[i * params.hidden];
      for (std::size_t h = 0; h < params.hidden; ++h) grow[h] += x[i] * delta_hidden[h];
    }
  }
  return loss;
}

MlpModel::MlpModel(FeatureSchema schema, MlpParameters params)
    : schema_(std::move(schema)), encoder_(schema_), params_(std::move(params)) {
  CheckShape(params_);
  if (params_.hidden != kHiddenUnits) {
    throw DataError("hidden layer must have exactly 25 units");
  }
  if (params_.inputs != encoder_.width()) {
    throw DataError("MLP input width does not match the schema encoding");
  }
  if (params_.outputs != schema_.num_classes()) {
    throw DataError("MLP output width does not match the class count");
  }
  for (double w : params_.Flatten()) {
    if (!std::isfinite(w)) throw DataError("MLP weights must be finite");
  }
}

std::vector<double> MlpModel::Logits(const Instance& instance) const {
  // Sparse forward pass: one row per continuous feature, one selected row per
  // categorical feature. Same summation order as Forward on Encode's output.
  std::array<double, kHiddenUnits> hidden;
  std::copy(params_.hidden_bias.begin(), params_.hidden_bias.end(), hidden.begin());
  for (std::size_t i = 0; i < schema_.num_features(); ++i) {
    const FeatureSpec& spec = schema_.feature(i);
    if (spec.is_continuous()) {
      const double x = Normalize(instance[i], spec);
      if (x == 0.0) continue;
      const double* row = &params_.hidden_weights[encoder_.offset(i) * kHiddenUnits];
      for (std::size_t h = 0; h < kHiddenUnits; ++h) hidden[h] += x * row[h];
    } else {
      const int code = instance.category(i);
      if (code < 0 || static_cast<std::size_t>(code) >= spec.categories.size()) {
        throw DataError("feature '" + spec.name +
                        "' has a value outside its category set");
      }
      const double* row =
          &params_.hidden_weights[(encoder_.offset(i) + code) * kHiddenUnits];
      for (std::size_t h = 0; h < kHiddenUnits; ++h) hidden[h] += 1.0 * row[h];
    }
  }
  std::vector<double> logits(params_.output_bias);
  for (std::size_t h = 0; h < kHiddenUnits; ++h) {
    const double a = std::max(0.0, hidden[h]);
    if (a == 0.0) continue;
    const double* row = &params_.output_weights[h * params_.outputs];
    for (std::size_t c = 0; c < params_.outputs; ++c) logits[c] += a * row[c];
  }
  return logits;
}

int MlpModel::Predict(const Instance& instance) const {
  return ArgMax(Logits(instance));
}

MlpModel TrainMlp(const Dataset& data, const MlpHyperparams& hp) {
  if (data.instances.empty()) throw DataError("cannot train on an empty dataset");
  if (std::adjacent_find(data.labels.begin(), data.labels.end(),
                         std::not_equal_to<>()) == data.labels.end()) {
    throw DataError("all labels are identical; need at least two classes");
  }
  if (hp.epochs < 0 || !(hp.learning_rate > 0)) {
    throw UsageError("epochs must be >= 0 and learning_rate > 0");
  }

  const InputEncoder encoder(data.schema);
  std::vector<std::vector<double>> inputs;
  inputs.reserve(data.instances.size());
  for (const Instance& x : data.instances) inputs.push_back(encoder.Encode(x));

  MlpParameters params = MlpParameters::Zeros(
      encoder.width(), kHiddenUnits, data.schema.num_classes());
  Rng rng(hp.seed);
  const double hidden_limit =
      std::sqrt(6.0 / static_cast<double>(params.inputs + params.hidden));
  const double output_limit =
      std::sqrt(6.0 / static_cast<double>(params.hidden + params.outputs));
  for (double& w : params.hidden_weights) w = rng.Uniform(-hidden_limit, hidden_limit);
  for (double& w : params.output_weights) w = rng.Uniform(-output_limit, output_limit);

  MlpParameters gradient;
  double loss = 0.0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    loss = CrossEntropyLoss(params, inputs, data.labels, &gradient);
    if (!std::isfinite(loss)) {
      throw TrainingError("loss became non-finite at epoch " +
                          std::to_string(epoch));
    }
    auto step = [&](std::vector<double>& w, const std::vector<double>& g) {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= hp.learning_rate * g[i];
    };
    step(params.hidden_weights, gradient.hidden_weights);
    step(params.hidden_bias, gradient.hidden_bias);
    step(params.output_weights, gradient.output_weights);
    step(params.output_bias, gradient.output_bias);
  }
  loss = CrossEntropyLoss(params, inputs, data.labels);
  if (!std::isfinite(loss)) throw TrainingError("final loss is non-finite");

  MlpModel model(data.schema, std::move(params));
  model.hyperparams = hp;
  model.final_loss = loss;
  model.training_accuracy = Accuracy(model, data);
  return model;
}

double Accuracy(const Predictor& model, const Dataset& data) {
  if (data.instances.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < data.instances.size(); ++r) {
    hits += model.Predict(data.instances[r]) == data.labels[r];
  }
  return static_cast<double>(hits) / static_cast<double>(data.instances.size());
}

double MajorityBaseline(const Dataset& data) {
  if (data.labels.empty()) return 0.0;
  std::map<int, std::size_t> counts;
  for (int y : data.labels) ++counts[y];
  std::size_t top = 0;
  for (const auto& [label, n] : counts) top = std::max(top, n);
  return static_cast<double>(top) / static_cast<double>(data.labels.size());
}

nlohmann::json ModelToJson(const MlpModel& model) {
  const MlpParameters& p = model.parameters();
  auto matrix = [](const std::vector<double>& flat, std::size_t rows,
                   std::size_t cols) {
    nlohmann::json m = nlohmann::json::array();
    for (std::size_t r = 0; r < rows; ++r) {
      m.push_back(std::vector<double>(flat.begin() + r * cols,
                                      flat.begin() + (r + 1) * cols));
    }
    return m;
  };
  nlohmann::json layout = nlohmann::json::array();
  for (std::size_t i = 0; i < model.schema().num_features(); ++i) {
    const FeatureSpec& f = model.schema().feature(i);
    layout.push_back({{"feature", f.name},
                      {"encoding", f.is_continuous() ? "minmax" : "onehot"},
                      {"offset", model.encoder().offset(i)},
                      {"width", f.is_continuous() ? 1 : f.categories.size()}});
  }
  return {
      {"model", model.name()},
      {"schema", SchemaToJson(model.schema())},
      {"encoding", std::move(layout)},
      {"class_order", model.schema().class_labels()},
      {"hidden_units", p.hidden},
      {"hidden_weights", matrix(p.hidden_weights, p.inputs, p.hidden)},
      {"hidden_bias", p.hidden_bias},
      {"output_weights", matrix(p.output_weights, p.hidden, p.outputs)},
      {"output_bias", p.output_bias},
      {"training",
       {{"epochs", model.hyperparams.epochs},
        {"learning_rate", model.hyperparams.learning_rate},
        {"seed", model.hyperparams.seed},
        {"accuracy", model.training_accuracy},
        {"final_loss", model.final_loss}}},
  };
}

MlpModel ModelFromJson(const nlohmann::json& j) {
  try {
    FeatureSchema schema = SchemaFromJson(j.at("schema"));
    const InputEncoder encoder(schema);
    MlpParameters p = MlpParameters::Zeros(
        encoder.width(), j.at("hidden_units").get<std::size_t>(),
        schema.num_classes());
    auto flatten = [](const nlohmann::json& m) {
      std::vector<double> flat;
      for (const auto& row : m) {
        for (const auto& v : row) flat.push_back(v.get<double>());
      }
      return flat;
    };
    p.hidden_weights = flatten(j.at("hidden_weights"));
    p.hidden_bias = j.at("hidden_bias").get<std::vector<double>>();
    p.output_weights = flatten(j.at("output_weights"));
    p.output_bias = j.at("output_bias").get<std::vector<double>>();
    MlpModel model(std::move(schema), std::move(p));
    const auto& t = j.at("training");
    model.hyperparams.epochs = t.at("epochs").get<int>();
    model.hyperparams.learning_rate = t.at("learning_rate").get<double>();
    model.hyperparams.seed = t.at("seed").get<std::uint64_t>();
    model.training_accuracy = t.at("accuracy").get<double>();
    model.final_loss = t.at("final_loss").get<double>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

void SaveModel(const MlpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << ModelToJson(model).dump(1) << '\n';
  if (!out) throw DataError("failed writing '" + path + "'");
}

MlpModel LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
  return ModelFromJson(j);
}

}  // namespace cfx
