#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tune/error.hpp"
#include "tune/search_space.hpp"

namespace tune {

//! One objective evaluation. Indices are contiguous from 0 in evaluation order.
struct Trial {
  std::size_t index = 0;
  Configuration config;
  double score = 0.0;
  double wall_time_seconds = 0.0;
};

struct Budget {
  std::size_t max_evaluations = 0;
};

struct StrategyResult {
  Configuration best_config;
  double best_score = 0.0;
  std::vector<Trial> history;
  std::string strategy_name;
  std::uint64_t seed = 0;
};

//! Earliest trial attaining the maximal score.
inline std::pair<Configuration, double> incumbent(const std::vector<Trial>& history) {
  if (history.empty()) fail(errc::empty_history, "incumbent of empty history");
  const Trial* best = &history.front();
  for (const Trial& t : history)
    if (t.score > best->score) best = &t;
  return {best->config, best->score};
}

using Objective = std::function<double(const Configuration&)>;
using TrialSink = std::function<void(const Trial&)>;

//! Wraps an objective with trial recording and budget accounting. Strategies
//! must consult exhausted() before evaluating; evaluating past the budget is
//! a programming error.
class Evaluator {
public:
  Evaluator(Objective objective, std::optional<std::size_t> budget, TrialSink sink = nullptr)
      : objective_(std::move(objective)), budget_(budget), sink_(std::move(sink)) {}

  bool exhausted() const { return budget_ && history_.size() >= *budget_; }

  std::size_t calls() const { return history_.size(); }

  double evaluate(const Configuration& config) {
    if (exhausted()) fail(errc::invalid_budget, "objective evaluated past its budget");
    auto start = std::chrono::steady_clock::now();
    double score = objective_(config);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    Trial trial{history_.size(), config, score, elapsed.count()};
    history_.push_back(trial);
    if (sink_) sink_(history_.back());
    return score;
  }

  const std::vector<Trial>& history() const { return history_; }

  StrategyResult finish(std::string strategy_name, std::uint64_t seed) {
    auto [config, score] = incumbent(history_);
    StrategyResult result;
    result.best_config = std::move(config);
    result.best_score = score;
    result.history = std::move(history_);
    result.strategy_name = std::move(strategy_name);
    result.seed = seed;
    return result;
  }

private:
  Objective objective_;
  std::optional<std::size_t> budget_;
  TrialSink sink_;
  std::vector<Trial> history_;
};

} // namespace tune
