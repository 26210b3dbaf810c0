#pragma once

#include <cstdint>

#include "credkit/panel.hpp"

namespace credkit::panel {

// Synthetic schema: feature indices (0-based) the generator fills with fixed
// semantics. Downstream analyses that need concrete columns (balances,
// inquiry flags, file thickness) reference these by default; user-supplied
// panels can remap them in configuration.
inline constexpr std::size_t kFeatCurrentDelinquent = 0;    // f001
inline constexpr std::size_t kFeatDelinquentCount8q = 1;    // f002
inline constexpr std::size_t kFeatQuartersSinceDelinquent = 2;  // f003
inline constexpr std::size_t kFeatCardBalance = 21;         // f022
inline constexpr std::size_t kFeatCardLimit = 22;           // f023
inline constexpr std::size_t kFeatCardInquiry = 23;         // f024
inline constexpr std::size_t kFeatCardOrigination = 24;     // f025
inline constexpr std::size_t kFeatMortgageBalance = 25;     // f026
inline constexpr std::size_t kFeatMortgageInquiry = 26;     // f027
inline constexpr std::size_t kFeatMortgageOrigination = 27; // f028
inline constexpr std::size_t kFeatUtilization = 28;         // f029
inline constexpr std::size_t kFeatHistoryYears = 64;        // f065
inline constexpr std::size_t kFeatProductTypes = 70;        // f071
inline constexpr std::size_t kFeatHasMortgage = 71;         // f072
inline constexpr std::size_t kFeatInquiries12m = 75;        // f076

struct GenConfig {
  std::size_t n_consumers = 1000;
  int n_quarters = 20;  // must leave at least one labelable quarter (>= 9)

  // Calibration target: mean of the 8-quarter default labels.
  double target_default_freq = 0.184;
  double freq_tolerance = 0.02;

  // Quarterly delinquency chain. Exit rate mirrors the observed persistence
  // of the default state; the entry rate is a logistic function of the
  // consumer's latent risk index, with its intercept solved so the stationary
  // label frequency hits the target.
  double exit_rate = 0.1460;
  double entry_rate_min = 0.002;
  double entry_rate_max = 0.40;
  double risk_slope = 1.5;

  // Credit-score proxy: noisy monotone transform of a latent index that
  // overweights length-of-history and new-credit signals relative to the
  // true risk index, so the score ranks strictly worse than true_pd.
  double score_noise_sd = 0.85;
  double unscored_fraction = 0.03;

  int n_zips = 50;

  void validate() const;  // throws InvalidConfig
};

// Deterministic in (config, seed): same inputs give byte-identical panels.
Panel generate_synthetic(const GenConfig& config, std::uint64_t seed);

// Mean 8-quarter default label over all labelable records.
double realized_default_frequency(const Panel& panel);

}  // namespace credkit::panel
