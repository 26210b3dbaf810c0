#pragma once

#include <stdexcept>
#include <string>

namespace credkit {

// Error codes carried by every credkit exception. The CLI maps these to exit
// codes; library callers can switch on them without string matching.
enum class Errc {
  missing_horizon,
  empty_input,
  invalid_config,
  parse_error,
  schema_error,
  invariant_violation,
  degenerate_labels,
  divergence_detected,
  insufficient_history,
  dim_too_large,
  collinear_regressors,
  empty_after_drops,
  too_few_clusters,
  key_mismatch,
  negative_balance,
  invalid_term,
  missing_rate,
  out_of_range,
  all_zero_likelihood,
  missing_input,
  io_error,
  internal,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace credkit
