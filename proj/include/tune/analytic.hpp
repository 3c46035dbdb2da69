#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "tune/search_space.hpp"
#include "tune/strategy.hpp"

namespace tune {

//! Closed-form objectives used by the bench CLI and the acceptance checks.
//! All are maximized.

inline SearchSpace sphere_space(std::size_t dims = 2, double lo = -5.0, double hi = 5.0) {
  SearchSpace space;
  for (std::size_t d = 0; d < dims; ++d)
    space.add("x" + std::to_string(d + 1), ContinuousRange{lo, hi});
  return space;
}

//! f(x) = -sum(x_i^2); optimum 0 at the origin.
inline Objective sphere_objective() {
  return [](const Configuration& config) {
    double acc = 0.0;
    for (const auto& [name, value] : config.items()) {
      double v = std::get<double>(value);
      acc += v * v;
    }
    return -acc;
  };
}

inline SearchSpace onemax_space(std::size_t genes = 10) {
  SearchSpace space;
  for (std::size_t g = 0; g < genes; ++g)
    space.add("g" + std::to_string(g), Categorical{{"0", "1"}});
  return space;
}

//! Counts genes decoding to "1"; optimum equals the gene count.
inline Objective onemax_objective() {
  return [](const Configuration& config) {
    double acc = 0.0;
    for (const auto& [name, value] : config.items())
      acc += std::get<std::string>(value) == "1" ? 1.0 : 0.0;
    return acc;
  };
}

inline SearchSpace smooth1d_space() {
  SearchSpace space;
  space.add("x", ContinuousRange{0.0, 1.0});
  return space;
}

//! f(x) = -(x - 0.3)^2 on [0, 1]; optimum 0 at x = 0.3.
inline Objective smooth1d_objective() {
  return [](const Configuration& config) {
    double x = config.get_real("x");
    return -(x - 0.3) * (x - 0.3);
  };
}

} // namespace tune
