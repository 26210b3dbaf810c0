#include "credkit/errors.hpp"

namespace credkit {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::missing_horizon: return "MissingHorizon";
    case Errc::empty_input: return "EmptyInput";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::parse_error: return "ParseError";
    case Errc::schema_error: return "SchemaError";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::degenerate_labels: return "DegenerateLabels";
    case Errc::divergence_detected: return "DivergenceDetected";
    case Errc::insufficient_history: return "InsufficientHistory";
    case Errc::dim_too_large: return "DimTooLarge";
    case Errc::collinear_regressors: return "CollinearRegressors";
    case Errc::empty_after_drops: return "EmptyAfterDrops";
    case Errc::too_few_clusters: return "TooFewClusters";
    case Errc::key_mismatch: return "KeyMismatch";
    case Errc::negative_balance: return "NegativeBalance";
    case Errc::invalid_term: return "InvalidTerm";
    case Errc::missing_rate: return "MissingRate";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::all_zero_likelihood: return "AllZeroLikelihood";
    case Errc::missing_input: return "MissingInput";
    case Errc::io_error: return "IoError";
    case Errc::internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace credkit
