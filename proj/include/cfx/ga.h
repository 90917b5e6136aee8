#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfx/dataset.h"
#include "cfx/metrics.h"
#include "cfx/model.h"
#include "cfx/random.h"

namespace cfx {

// A candidate counterfactual with its cached evaluation.
struct Individual {
  Instance values;
  int label = -1;
  double raw_distance = 0.0;
  int cardinality = 0;
  double score = 0.0;

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct GaConfig {
  int population_size = 200;
  int generations = 10;
  double mutation_probability = 0.2;   // per feature
  double crossover_probability = 0.5;  // per pairing
  int tournament_size = 2;
  std::uint64_t seed = 0;
  PenaltyConfig penalty;
  int elitism_count = 2;

  // Throws UsageError when a field is out of range.
  void Validate() const;

  friend bool operator==(const GaConfig&, const GaConfig&) = default;
};

// Defaults above with c_card derived from the schema.
GaConfig DefaultGaConfig(const FeatureSchema& schema, std::optional<int> k,
                         std::uint64_t seed);

struct GaOutcome {
  std::optional<Individual> best;
  // best exists, flips the label, and respects k when k is set.
  bool feasible = false;
  int original_label = -1;
  // Lowest score in each generation's population.
  std::vector<double> history;
  // Predictor calls, including the one on the original instance.
  std::int64_t evaluations = 0;

  friend bool operator==(const GaOutcome&, const GaOutcome&) = default;
};

// Each value drawn independently: categorical uniformly from the category
// set, continuous uniformly from [min, max].
std::vector<Instance> InitPopulation(const Instance& x,
                                     const FeatureSchema& schema, Rng& rng,
                                     int size);

// Tournament selection with replacement; returns the population index of
// the lowest score among the draws, lower index on ties.
std::size_t Select(std::span<const Individual> population, int tournament_size,
                   Rng& rng);

// Uniform crossover with probability p_c, otherwise a copy of `a`.
Instance Crossover(const Instance& a, const Instance& b, double p_c, Rng& rng);

// Per-feature resampling with probability p_m. Categorical features move to a
// different category when the domain allows it.
Instance Mutate(const Instance& ind, const FeatureSchema& schema, double p_m,
                Rng& rng);

Individual Evaluate(const Instance& x, Instance candidate, int original_label,
                    const Predictor& model, const FeatureSchema& schema,
                    const PenaltyConfig& penalty);

bool IsFeasible(const Individual& ind, int original_label,
                const PenaltyConfig& penalty);

// Infeasibility is reported through GaOutcome::feasible, never thrown.
GaOutcome Evolve(const Instance& x, const Predictor& model,
                 const FeatureSchema& schema, const GaConfig& config);

GaOutcome GenerateCounterfactual(const Instance& x, const Predictor& model,
                                 const FeatureSchema& schema,
                                 std::optional<int> k, std::uint64_t seed);

}  // namespace cfx
