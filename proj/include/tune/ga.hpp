#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tune/error.hpp"
#include "tune/rng.hpp"
#include "tune/search_space.hpp"
#include "tune/strategy.hpp"

namespace tune {

//! One gene per hyperparameter, in the space's real encoding. Decoding is
//! clipping, so any gene vector maps to a valid configuration.
struct Individual {
  RealVector genes;
  std::optional<double> fitness;
};

struct GAParams {
  std::size_t population_size = 10;
  std::size_t generations = 40;
  double crossover_prob = 0.9;
  double mutation_prob = 0.05; // per gene
  std::size_t tournament_size = 3;

  void validate() const {
    if (population_size < 1 || generations < 1 || tournament_size < 1)
      fail(errc::invalid_value, "GA sizes must be >= 1");
    if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 ||
        mutation_prob > 1.0)
      fail(errc::invalid_value, "GA probabilities must lie in [0, 1]");
  }
};

inline std::vector<Individual> init_population(const SearchSpace& space, std::size_t n,
                                               RandomStream& rng) {
  std::vector<Individual> population;
  population.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    population.push_back({space.encode(space.sample(rng)), std::nullopt});
  return population;
}

//! k draws with replacement; highest fitness wins, ties to the lowest index.
inline std::size_t tournament_select(const std::vector<Individual>& population, std::size_t k,
                                     RandomStream& rng) {
  if (population.empty()) fail(errc::empty_input, "tournament over empty population");
  std::size_t best = population.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t c = rng.uniform_index(population.size());
    if (!population[c].fitness) fail(errc::unset_fitness, "tournament candidate has no fitness");
    if (best == population.size() || *population[c].fitness > *population[best].fitness ||
        (*population[c].fitness == *population[best].fitness && c < best))
      best = c;
  }
  return best;
}

//! Uniform crossover: each gene position swaps between the children with
//! probability 0.5. Consumes one draw per position.
inline std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b,
                                                   RandomStream& rng) {
  if (a.genes.size() != b.genes.size())
    fail(errc::length_mismatch, "crossover of different gene lengths");
  Individual c1{a.genes, std::nullopt}, c2{b.genes, std::nullopt};
  for (std::size_t i = 0; i < a.genes.size(); ++i)
    if (rng.next_real() < 0.5) std::swap(c1.genes[i], c2.genes[i]);
  return {std::move(c1), std::move(c2)};
}

//! Each gene is independently resampled from its own domain with the given
//! probability; other genes are untouched.
inline Individual mutate(const Individual& ind, const SearchSpace& space, double per_gene_prob,
                         RandomStream& rng) {
  if (per_gene_prob < 0.0 || per_gene_prob > 1.0)
    fail(errc::invalid_value, "mutation probability must lie in [0, 1]");
  Individual out{ind.genes, ind.fitness};
  for (std::size_t d = 0; d < out.genes.size(); ++d) {
    if (rng.next_real() < per_gene_prob) {
      out.genes[d] = space.sample_component(d, rng);
      out.fitness.reset();
    }
  }
  return out;
}

//! Plain generational loop: tournament selection, paired uniform crossover,
//! per-gene mutation, wholesale replacement. Identical gene vectors within a
//! run reuse their score instead of spending budget; the incumbent lives in
//! the trial history, not the population.
inline StrategyResult ga_optimize(const SearchSpace& space, const Objective& objective,
                                  const GAParams& params, std::uint64_t seed,
                                  std::optional<std::size_t> budget = std::nullopt,
                                  TrialSink sink = nullptr) {
  space.validate();
  params.validate();

  RandomStream rng = RandomStream(seed).substream("ga");
  Evaluator evaluator(objective, budget, std::move(sink));
  std::map<RealVector, double> score_cache;

  auto ensure_fitness = [&](Individual& ind) -> bool {
    if (ind.fitness) return true;
    if (auto it = score_cache.find(ind.genes); it != score_cache.end()) {
      ind.fitness = it->second;
      return true;
    }
    if (evaluator.exhausted()) return false;
    double score = evaluator.evaluate(space.decode(ind.genes));
    score_cache.emplace(ind.genes, score);
    ind.fitness = score;
    return true;
  };

  std::vector<Individual> population = init_population(space, params.population_size, rng);
  for (auto& ind : population)
    if (!ensure_fitness(ind)) return evaluator.finish("ga", seed);

  for (std::size_t gen = 0; gen < params.generations; ++gen) {
    if (evaluator.exhausted()) break;

    std::vector<Individual> children;
    children.reserve(params.population_size);
    for (std::size_t i = 0; i < params.population_size; ++i)
      children.push_back(population[tournament_select(population, params.tournament_size, rng)]);

    for (std::size_t i = 0; i + 1 < children.size(); i += 2) {
      if (rng.next_real() < params.crossover_prob) {
        auto [c1, c2] = crossover(children[i], children[i + 1], rng);
        children[i] = std::move(c1);
        children[i + 1] = std::move(c2);
      }
    }
    for (auto& child : children) child = mutate(child, space, params.mutation_prob, rng);

    bool complete = true;
    for (auto& child : children)
      if (!ensure_fitness(child)) {
        complete = false;
        break;
      }
    if (!complete) break;
    population = std::move(children);
  }
  return evaluator.finish("ga", seed);
}

} // namespace tune
