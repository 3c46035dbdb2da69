#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tune/error.hpp"
#include "tune/rng.hpp"

namespace tune {

//! A concrete hyperparameter value: category name, integer, or real.
using Value = std::variant<std::string, std::int64_t, double>;

struct Categorical {
  std::vector<std::string> values;
  bool operator==(const Categorical&) const = default;
};

//! Inclusive integer interval.
struct IntegerRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool operator==(const IntegerRange&) const = default;
};

enum class Sampling { uniform, log_uniform };

struct ContinuousRange {
  double lo = 0.0;
  double hi = 0.0;
  Sampling sampling = Sampling::uniform;
  bool operator==(const ContinuousRange&) const = default;
};

//! Explicit finite list of numeric axis values (grid-style spaces).
struct DiscreteValues {
  std::vector<double> values;

  bool integral() const {
    return std::all_of(values.begin(), values.end(), [](double v) {
      return std::isfinite(v) && v == std::floor(v) &&
             std::abs(v) <= 9.0e15; // representable as int64 without loss
    });
  }

  bool operator==(const DiscreteValues&) const = default;
};

using ParamDomain = std::variant<Categorical, IntegerRange, ContinuousRange, DiscreteValues>;

struct Parameter {
  std::string name;
  ParamDomain domain;
};

using RealVector = std::vector<double>;

//! One full assignment of a value to every parameter of a SearchSpace,
//! stored in the space's parameter order.
class Configuration {
public:
  Configuration() = default;
  explicit Configuration(std::vector<std::pair<std::string, Value>> values)
      : values_(std::move(values)) {}

  const std::vector<std::pair<std::string, Value>>& items() const { return values_; }
  std::size_t size() const { return values_.size(); }

  const Value& at(std::string_view name) const {
    for (const auto& [n, v] : values_)
      if (n == name) return v;
    fail(errc::unknown_parameter, "no parameter named '" + std::string(name) + "'");
  }

  //! Integer accessor; accepts integral doubles.
  std::int64_t get_int(std::string_view name) const {
    const Value& v = at(name);
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    if (std::holds_alternative<double>(v)) {
      double d = std::get<double>(v);
      if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
    }
    fail(errc::invalid_value, "parameter '" + std::string(name) + "' is not an integer");
  }

  double get_real(std::string_view name) const {
    const Value& v = at(name);
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<std::int64_t>(v))
      return static_cast<double>(std::get<std::int64_t>(v));
    fail(errc::invalid_value, "parameter '" + std::string(name) + "' is not numeric");
  }

  const std::string& get_string(std::string_view name) const {
    const Value& v = at(name);
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    fail(errc::invalid_value, "parameter '" + std::string(name) + "' is not categorical");
  }

  bool operator==(const Configuration&) const = default;

private:
  std::vector<std::pair<std::string, Value>> values_;
};

namespace detail {

//! Rounds half away from zero (behaviour of std::round).
inline std::int64_t round_half_away(double v) {
  return static_cast<std::int64_t>(std::llround(v));
}

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

} // namespace detail

//! Ordered collection of named parameter domains. Encoding dimension i
//! always corresponds to params()[i].
class SearchSpace {
public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<Parameter> params) : params_(std::move(params)) {}

  SearchSpace& add(std::string name, ParamDomain domain) {
    params_.push_back({std::move(name), std::move(domain)});
    return *this;
  }

  const std::vector<Parameter>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }

  //! Checks all domain invariants; throws naming the offending parameter.
  void validate() const {
    std::set<std::string> seen;
    for (const auto& p : params_) {
      if (p.name.empty()) fail(errc::duplicate_name, "parameter with empty name");
      if (!seen.insert(p.name).second)
        fail(errc::duplicate_name, "duplicate parameter name '" + p.name + "'");
      if (const auto* c = std::get_if<Categorical>(&p.domain)) {
        if (c->values.empty())
          fail(errc::empty_categorical, "categorical '" + p.name + "' has no values");
        std::set<std::string> vals(c->values.begin(), c->values.end());
        if (vals.size() != c->values.size())
          fail(errc::empty_categorical, "categorical '" + p.name + "' has duplicate values");
      } else if (const auto* i = std::get_if<IntegerRange>(&p.domain)) {
        if (i->lo > i->hi)
          fail(errc::inverted_range, "integer range '" + p.name + "' has lo > hi");
      } else if (const auto* r = std::get_if<ContinuousRange>(&p.domain)) {
        if (!(r->lo <= r->hi))
          fail(errc::inverted_range, "continuous range '" + p.name + "' has lo > hi");
        if (r->sampling == Sampling::log_uniform && !(r->lo > 0.0))
          fail(errc::log_uniform_non_positive,
               "log-uniform range '" + p.name + "' requires lo > 0");
      } else if (const auto* d = std::get_if<DiscreteValues>(&p.domain)) {
        if (d->values.empty())
          fail(errc::empty_categorical, "value list '" + p.name + "' is empty");
        for (double v : d->values)
          if (!std::isfinite(v))
            fail(errc::invalid_value, "value list '" + p.name + "' has non-finite entry");
        std::set<double> vals(d->values.begin(), d->values.end());
        if (vals.size() != d->values.size())
          fail(errc::empty_categorical, "value list '" + p.name + "' has duplicate values");
      }
    }
  }

  //! One independent draw per parameter, in parameter order.
  Configuration sample(RandomStream& rng) const {
    std::vector<std::pair<std::string, Value>> out;
    out.reserve(params_.size());
    for (const auto& p : params_) out.emplace_back(p.name, sample_domain(p.domain, rng));
    return Configuration(std::move(out));
  }

  //! Full cartesian product in lexicographic (param order, value order).
  //! Every axis must be Categorical or DiscreteValues.
  std::vector<Configuration> enumerate_grid() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(params_.size());
    for (const auto& p : params_) {
      if (const auto* c = std::get_if<Categorical>(&p.domain)) {
        sizes.push_back(c->values.size());
      } else if (const auto* d = std::get_if<DiscreteValues>(&p.domain)) {
        sizes.push_back(d->values.size());
      } else {
        fail(errc::non_finite_domain,
             "grid axis '" + p.name + "' must be an explicit value list or categorical");
      }
    }
    std::size_t total = 1;
    for (std::size_t s : sizes) total *= s;
    std::vector<Configuration> out;
    out.reserve(total);
    std::vector<std::size_t> idx(params_.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
      std::vector<std::pair<std::string, Value>> vals;
      vals.reserve(params_.size());
      for (std::size_t d = 0; d < params_.size(); ++d)
        vals.emplace_back(params_[d].name, value_at(params_[d].domain, idx[d]));
      out.emplace_back(std::move(vals));
      // odometer: last parameter cycles fastest
      for (std::size_t d = params_.size(); d-- > 0;) {
        if (++idx[d] < sizes[d]) break;
        idx[d] = 0;
      }
    }
    return out;
  }

  //! Fixed-length real encoding: categorical -> value index, numeric -> raw value.
  RealVector encode(const Configuration& config) const {
    if (config.size() != params_.size())
      fail(errc::dimension_mismatch, "configuration size does not match space");
    RealVector v(params_.size());
    for (std::size_t d = 0; d < params_.size(); ++d) {
      const auto& p = params_[d];
      if (const auto* c = std::get_if<Categorical>(&p.domain)) {
        const std::string& s = config.get_string(p.name);
        auto it = std::find(c->values.begin(), c->values.end(), s);
        if (it == c->values.end())
          fail(errc::invalid_value, "'" + s + "' not in domain of '" + p.name + "'");
        v[d] = static_cast<double>(it - c->values.begin());
      } else if (std::holds_alternative<IntegerRange>(p.domain)) {
        v[d] = static_cast<double>(config.get_int(p.name));
      } else {
        v[d] = config.get_real(p.name);
      }
    }
    return v;
  }

  //! Inverse of encode with clipping: every component is clamped into its
  //! domain, integer/categorical components round half away from zero, and
  //! value-list components snap to the nearest listed value. Any real vector
  //! of the right length decodes to a valid Configuration.
  Configuration decode(const RealVector& v) const {
    if (v.size() != params_.size())
      fail(errc::dimension_mismatch, "vector length does not match space dimension");
    std::vector<std::pair<std::string, Value>> out;
    out.reserve(params_.size());
    for (std::size_t d = 0; d < params_.size(); ++d) {
      const auto& p = params_[d];
      double x = v[d];
      if (std::isnan(x)) x = encoded_bounds(d).first;
      if (const auto* c = std::get_if<Categorical>(&p.domain)) {
        double cl = detail::clamp(x, 0.0, static_cast<double>(c->values.size() - 1));
        auto idx = static_cast<std::size_t>(detail::round_half_away(cl));
        out.emplace_back(p.name, c->values[idx]);
      } else if (const auto* i = std::get_if<IntegerRange>(&p.domain)) {
        double cl = detail::clamp(x, static_cast<double>(i->lo), static_cast<double>(i->hi));
        out.emplace_back(p.name, detail::round_half_away(cl));
      } else if (const auto* r = std::get_if<ContinuousRange>(&p.domain)) {
        out.emplace_back(p.name, detail::clamp(x, r->lo, r->hi));
      } else {
        const auto& dv = std::get<DiscreteValues>(p.domain);
        double best = dv.values.front();
        for (double cand : dv.values) {
          double dc = std::abs(cand - x), db = std::abs(best - x);
          if (dc < db || (dc == db && cand < best)) best = cand;
        }
        if (dv.integral())
          out.emplace_back(p.name, static_cast<std::int64_t>(best));
        else
          out.emplace_back(p.name, best);
      }
    }
    return Configuration(std::move(out));
  }

  //! Fresh draw of a single parameter, returned in its encoded form.
  //! Distribution matches sampling the parameter and encoding the result.
  double sample_component(std::size_t d, RandomStream& rng) const {
    const auto& dom = params_[d].domain;
    if (const auto* c = std::get_if<Categorical>(&dom))
      return static_cast<double>(rng.uniform_index(c->values.size()));
    if (const auto* i = std::get_if<IntegerRange>(&dom))
      return static_cast<double>(rng.uniform_int(i->lo, i->hi));
    if (const auto* r = std::get_if<ContinuousRange>(&dom)) {
      if (r->sampling == Sampling::log_uniform)
        return std::exp(rng.uniform_real(std::log(r->lo), std::log(r->hi)));
      return rng.uniform_real(r->lo, r->hi);
    }
    const auto& dv = std::get<DiscreteValues>(dom);
    return dv.values[rng.uniform_index(dv.values.size())];
  }

  //! [lo, hi] of encoding dimension d ([0, k-1] for a k-way categorical).
  std::pair<double, double> encoded_bounds(std::size_t d) const {
    const auto& dom = params_[d].domain;
    if (const auto* c = std::get_if<Categorical>(&dom))
      return {0.0, static_cast<double>(c->values.size() - 1)};
    if (const auto* i = std::get_if<IntegerRange>(&dom))
      return {static_cast<double>(i->lo), static_cast<double>(i->hi)};
    if (const auto* r = std::get_if<ContinuousRange>(&dom)) return {r->lo, r->hi};
    const auto& dv = std::get<DiscreteValues>(dom);
    auto [mn, mx] = std::minmax_element(dv.values.begin(), dv.values.end());
    return {*mn, *mx};
  }

  bool operator==(const SearchSpace& other) const {
    if (params_.size() != other.params_.size()) return false;
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].name != other.params_[i].name) return false;
      if (params_[i].domain != other.params_[i].domain) return false;
    }
    return true;
  }

private:
  static Value sample_domain(const ParamDomain& dom, RandomStream& rng) {
    if (const auto* c = std::get_if<Categorical>(&dom))
      return c->values[rng.uniform_index(c->values.size())];
    if (const auto* i = std::get_if<IntegerRange>(&dom)) return rng.uniform_int(i->lo, i->hi);
    if (const auto* r = std::get_if<ContinuousRange>(&dom)) {
      if (r->sampling == Sampling::log_uniform)
        return std::exp(rng.uniform_real(std::log(r->lo), std::log(r->hi)));
      return rng.uniform_real(r->lo, r->hi);
    }
    const auto& dv = std::get<DiscreteValues>(dom);
    double v = dv.values[rng.uniform_index(dv.values.size())];
    if (dv.integral()) return static_cast<std::int64_t>(v);
    return v;
  }

  static Value value_at(const ParamDomain& dom, std::size_t idx) {
    if (const auto* c = std::get_if<Categorical>(&dom)) return c->values[idx];
    const auto& dv = std::get<DiscreteValues>(dom);
    if (dv.integral()) return static_cast<std::int64_t>(dv.values[idx]);
    return dv.values[idx];
  }

  std::vector<Parameter> params_;
};

} // namespace tune
