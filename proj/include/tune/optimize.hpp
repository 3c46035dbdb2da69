#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tune/bayes.hpp"
#include "tune/error.hpp"
#include "tune/ga.hpp"
#include "tune/grid_random.hpp"
#include "tune/pso.hpp"
#include "tune/strategy.hpp"

namespace tune {

struct StrategyOptions {
  GAParams ga;
  PsoParams pso;
  BayesParams bayes;
};

//! Uniform dispatch over the five strategies. Grid ignores the budget and
//! seed; random and bayes require a budget; GA and PSO stop early when a
//! budget runs out mid-campaign.
inline StrategyResult run_strategy(const std::string& name, const SearchSpace& space,
                                   const Objective& objective,
                                   std::optional<std::size_t> budget, std::uint64_t seed,
                                   const StrategyOptions& options = {},
                                   TrialSink sink = nullptr) {
  if (name == "grid") return grid_search(space, objective, std::move(sink));
  if (name == "random") {
    if (!budget) fail(errc::invalid_budget, "random search requires a budget");
    return random_search(space, objective, *budget, seed, std::move(sink));
  }
  if (name == "bayes") {
    if (!budget) fail(errc::invalid_budget, "bayes requires a budget");
    return bayes_optimize(space, objective, *budget, seed, options.bayes, std::move(sink));
  }
  if (name == "ga") return ga_optimize(space, objective, options.ga, seed, budget, std::move(sink));
  if (name == "pso")
    return pso_optimize(space, objective, options.pso, seed, budget, std::move(sink));
  fail(errc::unknown_strategy, "unknown strategy '" + name + "'");
}

} // namespace tune
