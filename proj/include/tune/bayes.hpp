#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tune/gp.hpp"
#include "tune/rng.hpp"
#include "tune/search_space.hpp"
#include "tune/strategy.hpp"

namespace tune {

//! Maps configurations to GP inputs: numeric parameters pass through as raw
//! values, categorical parameters expand to one-hot blocks so that distinct
//! categories sit at equal kernel distances.
class GpEncoder {
public:
  explicit GpEncoder(const SearchSpace& space) : space_(&space) {
    dim_ = 0;
    for (const auto& p : space.params()) {
      offsets_.push_back(dim_);
      if (const auto* c = std::get_if<Categorical>(&p.domain))
        dim_ += c->values.size();
      else
        dim_ += 1;
    }
  }

  std::size_t dim() const { return dim_; }

  RealVector encode(const Configuration& config) const {
    RealVector out(dim_, 0.0);
    const auto& params = space_->params();
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (const auto* c = std::get_if<Categorical>(&params[i].domain)) {
        const std::string& v = config.get_string(params[i].name);
        for (std::size_t j = 0; j < c->values.size(); ++j)
          if (c->values[j] == v) out[offsets_[i] + j] = 1.0;
      } else {
        out[offsets_[i]] = config.get_real(params[i].name);
      }
    }
    return out;
  }

private:
  const SearchSpace* space_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
};

struct BayesParams {
  std::size_t init_points = 10;
  std::size_t candidates = 2048;
};

//! GP-guided sequential optimization: `init_points` random trials, then one
//! expected-improvement-screened proposal per iteration. Candidates are
//! uniform draws in the encoded box, decoded through the space's clipping
//! decode, so proposals are always in-domain.
inline StrategyResult bayes_optimize(const SearchSpace& space, const Objective& objective,
                                     std::size_t budget, std::uint64_t seed,
                                     const BayesParams& params = {}, TrialSink sink = nullptr) {
  space.validate();
  if (budget < params.init_points + 1)
    fail(errc::invalid_budget, "budget must exceed the initial design size");

  RandomStream root(seed);
  Evaluator evaluator(objective, budget, std::move(sink));
  GpEncoder encoder(space);

  RandomStream init_rng = root.substream("init");
  for (std::size_t i = 0; i < params.init_points && !evaluator.exhausted(); ++i)
    evaluator.evaluate(space.sample(init_rng));

  std::size_t iteration = 0;
  while (!evaluator.exhausted()) {
    const auto& history = evaluator.history();
    std::vector<RealVector> X;
    std::vector<double> y;
    X.reserve(history.size());
    y.reserve(history.size());
    double best_score = history.front().score;
    for (const Trial& t : history) {
      X.push_back(encoder.encode(t.config));
      y.push_back(t.score);
      best_score = std::max(best_score, t.score);
    }
    GPModel model = gp_fit(X, y);

    RandomStream cand_rng = root.substream("candidates", iteration++);
    Configuration proposal;
    double best_ei = -1.0;
    RealVector point(space.size());
    for (std::size_t c = 0; c < params.candidates; ++c) {
      for (std::size_t d = 0; d < space.size(); ++d) {
        auto [lo, hi] = space.encoded_bounds(d);
        point[d] = cand_rng.uniform_real(lo, hi);
      }
      Configuration config = space.decode(point);
      auto [mean, variance] = gp_predict(model, encoder.encode(config));
      double ei = expected_improvement(mean, variance, best_score);
      if (ei > best_ei) {
        best_ei = ei;
        proposal = std::move(config);
      }
    }
    evaluator.evaluate(proposal);
  }
  return evaluator.finish("bayes", seed);
}

} // namespace tune
