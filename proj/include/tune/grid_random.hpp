#pragma once

#include <cstdint>
#include <string>

#include "tune/rng.hpp"
#include "tune/search_space.hpp"
#include "tune/strategy.hpp"

namespace tune {

//! Evaluates every grid configuration exactly once, in enumeration order.
//! The space must be grid-enumerable; no budget applies.
inline StrategyResult grid_search(const SearchSpace& space, const Objective& objective,
                                  TrialSink sink = nullptr) {
  space.validate();
  auto grid = space.enumerate_grid();
  Evaluator evaluator(objective, std::nullopt, std::move(sink));
  for (const auto& config : grid) evaluator.evaluate(config);
  return evaluator.finish("grid", 0);
}

//! Draws `budget` independent samples and evaluates each; duplicates are
//! evaluated again. The sample sequence is that of space.sample on a fresh
//! RandomStream(seed).
inline StrategyResult random_search(const SearchSpace& space, const Objective& objective,
                                    std::size_t budget, std::uint64_t seed,
                                    TrialSink sink = nullptr) {
  space.validate();
  if (budget < 1) fail(errc::invalid_budget, "random search requires budget >= 1");
  RandomStream rng(seed);
  Evaluator evaluator(objective, budget, std::move(sink));
  while (!evaluator.exhausted()) evaluator.evaluate(space.sample(rng));
  return evaluator.finish("random", seed);
}

} // namespace tune
