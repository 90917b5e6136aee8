#include "cfx/ga.h"

#include <algorithm>
#include <numeric>

#include "cfx/errors.h"

namespace cfx {

void GaConfig::Validate() const {
  if (population_size < 1) throw UsageError("population_size must be >= 1");
  if (generations < 1) throw UsageError("generations must be >= 1");
  if (!(mutation_probability >= 0 && mutation_probability <= 1)) {
    throw UsageError("mutation probability must lie in [0, 1]");
  }
  if (!(crossover_probability >= 0 && crossover_probability <= 1)) {
    throw UsageError("crossover probability must lie in [0, 1]");
  }
  if (tournament_size < 1) throw UsageError("tournament_size must be >= 1");
  if (elitism_count < 0 || elitism_count >= population_size) {
    throw UsageError("elitism_count must lie in [0, population_size)");
  }
  if (penalty.k && *penalty.k < 0) throw UsageError("k must be >= 0");
  if (!(penalty.c_card > 0)) throw UsageError("c_card must be positive");
}

GaConfig DefaultGaConfig(const FeatureSchema& schema, std::optional<int> k,
                         std::uint64_t seed) {
  GaConfig config;
  config.seed = seed;
  config.penalty = PenaltyConfig::ForSchema(schema, k);
  return config;
}

std::vector<Instance> InitPopulation(const Instance& x,
                                     const FeatureSchema& schema, Rng& rng,
                                     int size) {
  std::vector<Instance> population;
  population.reserve(size);
  std::vector<double> values(x.size());
  for (int n = 0; n < size; ++n) {
    for (std::size_t i = 0; i < schema.num_features(); ++i) {
      const FeatureSpec& spec = schema.feature(i);
      values[i] = spec.is_continuous()
                      ? rng.Uniform(spec.min, spec.max)
                      : static_cast<double>(rng.UniformIndex(spec.categories.size()));
    }
    population.emplace_back(values);
  }
  return population;
}

std::size_t Select(std::span<const Individual> population, int tournament_size,
                   Rng& rng) {
  std::size_t winner = rng.UniformIndex(population.size());
  for (int t = 1; t < tournament_size; ++t) {
    const std::size_t challenger = rng.UniformIndex(population.size());
    const double a = population[challenger].score;
    const double b = population[winner].score;
    if (a < b || (a == b && challenger < winner)) winner = challenger;
  }
  return winner;
}

Instance Crossover(const Instance& a, const Instance& b, double p_c, Rng& rng) {
  if (!rng.Bernoulli(p_c)) return a;
  Instance child = a;
  for (std::size_t i = 0; i < child.size(); ++i) {
    if (rng.Bernoulli(0.5)) child[i] = b[i];
  }
  return child;
}

Instance Mutate(const Instance& ind, const FeatureSchema& schema, double p_m,
                Rng& rng) {
  Instance out = ind;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!rng.Bernoulli(p_m)) continue;
    const FeatureSpec& spec = schema.feature(i);
    if (spec.is_continuous()) {
      out[i] = rng.Uniform(spec.min, spec.max);
    } else if (spec.categories.size() > 1) {
      // Draw from the other m-1 categories.
      const auto current = static_cast<std::uint64_t>(out.category(i));
      std::uint64_t pick = rng.UniformIndex(spec.categories.size() - 1);
      if (pick >= current) ++pick;
      out[i] = static_cast<double>(pick);
    }
  }
  return out;
}

Individual Evaluate(const Instance& x, Instance candidate, int original_label,
                    const Predictor& model, const FeatureSchema& schema,
                    const PenaltyConfig& penalty) {
  Individual ind;
  ind.label = model.Predict(candidate);
  ind.raw_distance = Distance(x, candidate, schema, penalty.scale).total;
  ind.cardinality = Cardinality(x, candidate, schema);
  ind.score = ScoreFrom(ind.raw_distance, ind.cardinality,
                        ind.label != original_label, schema, penalty);
  ind.values = std::move(candidate);
  return ind;
}

bool IsFeasible(const Individual& ind, int original_label,
                const PenaltyConfig& penalty) {
  return ind.label != original_label &&
         (!penalty.k || ind.cardinality <= *penalty.k);
}

GaOutcome Evolve(const Instance& x, const Predictor& model,
                 const FeatureSchema& schema, const GaConfig& config) {
  config.Validate();
  schema.Validate(x);

  GaOutcome outcome;
  Rng rng(config.seed);
  outcome.original_label = model.Predict(x);
  outcome.evaluations = 1;

  auto evaluate_all = [&](std::vector<Instance> candidates) {
    std::vector<Individual> scored;
    scored.reserve(candidates.size());
    for (Instance& c : candidates) {
      scored.push_back(Evaluate(x, std::move(c), outcome.original_label, model,
                                schema, config.penalty));
    }
    outcome.evaluations += static_cast<std::int64_t>(scored.size());
    return scored;
  };

  std::vector<Individual> population =
      evaluate_all(InitPopulation(x, schema, rng, config.population_size));
  std::vector<std::size_t> order(population.size());

  for (int generation = 0; generation < config.generations; ++generation) {
    if (generation > 0) {
      // All random draws happen here, before any evaluation.
      std::vector<Instance> children;
      children.reserve(config.population_size - config.elitism_count);
      for (int n = config.elitism_count; n < config.population_size; ++n) {
        const Individual& a = population[Select(population, config.tournament_size, rng)];
        const Individual& b = population[Select(population, config.tournament_size, rng)];
        children.push_back(
            Mutate(Crossover(a.values, b.values, config.crossover_probability, rng),
                   schema, config.mutation_probability, rng));
      }
      std::vector<Individual> next;
      next.reserve(config.population_size);
      for (int e = 0; e < config.elitism_count; ++e) {
        next.push_back(population[order[e]]);
      }
      for (Individual& child : evaluate_all(std::move(children))) {
        next.push_back(std::move(child));
      }
      population = std::move(next);
    }

    // Rank by (score, index); the first entry is this generation's best.
    order.resize(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return population[a].score < population[b].score;
    });
    const Individual& top = population[order.front()];
    outcome.history.push_back(top.score);
    if (!outcome.best || top.score < outcome.best->score) outcome.best = top;
  }

  outcome.feasible =
      outcome.best && IsFeasible(*outcome.best, outcome.original_label, config.penalty);
  return outcome;
}

GaOutcome GenerateCounterfactual(const Instance& x, const Predictor& model,
                                 const FeatureSchema& schema,
                                 std::optional<int> k, std::uint64_t seed) {
  return Evolve(x, model, schema, DefaultGaConfig(schema, k, seed));
}

}  // namespace cfx
