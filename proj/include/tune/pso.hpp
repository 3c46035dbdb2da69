#pragma once

#include <cstdint>
#include <vector>

#include "tune/error.hpp"
#include "tune/rng.hpp"
#include "tune/search_space.hpp"
#include "tune/strategy.hpp"

namespace tune {

struct Particle {
  RealVector position;
  RealVector velocity;
  RealVector best_position;
  double best_score = 0.0;
};

struct PsoParams {
  std::size_t swarm_size = 10;
  std::size_t generations = 40;
  double phi1 = 0.5; // personal-best acceleration
  double phi2 = 0.5; // global-best acceleration

  void validate() const {
    if (swarm_size < 1 || generations < 1) fail(errc::invalid_value, "PSO sizes must be >= 1");
    if (phi1 < 0.0 || phi2 < 0.0) fail(errc::invalid_value, "PSO coefficients must be >= 0");
  }
};

struct Swarm {
  std::vector<Particle> particles;
  RealVector best_position;
  double best_score = 0.0;
};

//! Positions are encoded random samples; velocities start at zero. Personal
//! bests are set by the caller after the first evaluation.
inline Swarm init_swarm(const SearchSpace& space, std::size_t n, RandomStream& rng) {
  Swarm swarm;
  swarm.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Particle p;
    p.position = space.encode(space.sample(rng));
    p.velocity.assign(space.size(), 0.0);
    p.best_position = p.position;
    swarm.particles.push_back(std::move(p));
  }
  return swarm;
}

//! v' = v + u1*phi1*(p_best - x) + u2*phi2*(g_best - x) with fresh per-
//! dimension uniforms (u1 drawn before u2), then clamped to half the encoded
//! domain range per dimension.
inline RealVector update_velocity(const Particle& particle, const RealVector& global_best,
                                  double phi1, double phi2, const SearchSpace& space,
                                  RandomStream& rng) {
  if (particle.position.size() != global_best.size() ||
      particle.position.size() != space.size())
    fail(errc::dimension_mismatch, "particle/space dimension mismatch");
  RealVector v(particle.position.size());
  for (std::size_t d = 0; d < v.size(); ++d) {
    double u1 = rng.next_real();
    double u2 = rng.next_real();
    double nv = particle.velocity[d] +
                u1 * phi1 * (particle.best_position[d] - particle.position[d]) +
                u2 * phi2 * (global_best[d] - particle.position[d]);
    auto [lo, hi] = space.encoded_bounds(d);
    double cap = 0.5 * (hi - lo);
    if (nv > cap) nv = cap;
    if (nv < -cap) nv = -cap;
    v[d] = nv;
  }
  return v;
}

//! Global-best particle swarm. Positions are never clipped between steps;
//! only the decoded configuration evaluated each generation is. Personal and
//! global bests require strict improvement, so ties keep the older best.
inline StrategyResult pso_optimize(const SearchSpace& space, const Objective& objective,
                                   const PsoParams& params, std::uint64_t seed,
                                   std::optional<std::size_t> budget = std::nullopt,
                                   TrialSink sink = nullptr) {
  space.validate();
  params.validate();

  RandomStream rng = RandomStream(seed).substream("pso");
  Evaluator evaluator(objective, budget, std::move(sink));

  Swarm swarm = init_swarm(space, params.swarm_size, rng);
  bool have_global = false;
  for (auto& p : swarm.particles) {
    if (evaluator.exhausted()) return evaluator.finish("pso", seed);
    p.best_score = evaluator.evaluate(space.decode(p.position));
    p.best_position = p.position;
    if (!have_global || p.best_score > swarm.best_score) {
      swarm.best_score = p.best_score;
      swarm.best_position = p.best_position;
      have_global = true;
    }
  }

  for (std::size_t gen = 0; gen < params.generations; ++gen) {
    if (evaluator.exhausted()) break;
    // synchronous update: all velocities use this generation's global best
    for (auto& p : swarm.particles) {
      p.velocity = update_velocity(p, swarm.best_position, params.phi1, params.phi2, space, rng);
      for (std::size_t d = 0; d < p.position.size(); ++d) p.position[d] += p.velocity[d];
    }
    for (auto& p : swarm.particles) {
      if (evaluator.exhausted()) break;
      double score = evaluator.evaluate(space.decode(p.position));
      if (score > p.best_score) {
        p.best_score = score;
        p.best_position = p.position;
      }
    }
    for (const auto& p : swarm.particles) {
      if (p.best_score > swarm.best_score) {
        swarm.best_score = p.best_score;
        swarm.best_position = p.best_position;
      }
    }
  }
  return evaluator.finish("pso", seed);
}

} // namespace tune
