#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tune {

enum class errc {
  duplicate_name,
  empty_categorical,
  inverted_range,
  log_uniform_non_positive,
  non_finite_domain,
  dimension_mismatch,
  unknown_parameter,
  invalid_value,
  all_zero_counts,
  empty_dataset,
  missing_column,
  parse_error,
  unknown_label,
  n_too_large,
  empty_matrix,
  class_with_single_row,
  k_too_large,
  length_mismatch,
  empty_input,
  unknown_strategy,
  empty_history,
  invalid_budget,
  unset_fitness,
  degenerate_inputs,
  io_error,
  bad_config,
};

//! Library-wide exception; `code()` identifies the failure class so callers
//! can branch without string matching.
class Error : public std::runtime_error {
public:
  Error(errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace tune
