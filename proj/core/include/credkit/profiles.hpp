#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "credkit/metrics.hpp"

namespace credkit::profiles {

// Industry risk bands, ordered by ascending credit quality.
enum class RiskProfile : int {
  deep_subprime = 0,
  subprime = 1,
  near_prime = 2,
  prime = 3,
  super_prime = 4,
};
inline constexpr std::size_t kNumProfiles = 5;
const char* profile_label(RiskProfile p);

// The five score bands with their percentile restatement and population
// shares. The two restatements disagree by 1.0pp for two bands
// (27.10 - 6.0 != 20.1): pointwise band lookup uses the percentile cutoffs,
// while whole-quarter model-profile assignment is an equal-frequency cut at
// the cumulative population shares, so that each model band holds exactly
// its band's share of borrowers, riskiest band first.
struct RiskProfileTable {
  std::array<int, kNumProfiles> score_lo = {300, 500, 601, 661, 781};
  std::array<int, kNumProfiles> score_hi = {499, 600, 660, 780, 850};
  std::array<double, 4> percentile_cutoffs = {6.0, 27.10, 41.10, 77.40};
  std::array<double, kNumProfiles> population_shares = {6.0, 20.1, 14.0, 36.3, 23.6};

  static const RiskProfileTable& industry();

  // Cumulative population shares: {6.0, 26.1, 40.1, 76.4}.
  std::array<double, 4> share_cutoffs() const;
};

// Band lookup over the score ranges. Throws OutOfRange outside [300, 850].
RiskProfile score_to_profile(int score, const RiskProfileTable& table = RiskProfileTable::industry());

// Band lookup at the table's percentile cutoffs; a percentile exactly at a
// cutoff belongs to the band below (inclusive-left). Percentiles are on the
// safety scale (low percentile = highest risk).
RiskProfile rank_to_profile(double percentile, const RiskProfileTable& table = RiskProfileTable::industry());
RiskProfile rank_to_profile(double percentile, const std::array<double, 4>& cutoffs);

// Model profile per row, assigned per quarter: percentile of 1 - p_hat cut at
// cumulative population shares (equal-frequency construction).
std::vector<RiskProfile> assign_model_profiles(const metrics::PredictionSet& predictions,
                                               const RiskProfileTable& table = RiskProfileTable::industry());

struct DisagreementMatrix {
  // Rows: score profile; columns: model profile; row percentages.
  std::array<std::array<double, kNumProfiles>, kNumProfiles> row_pct{};
  std::array<double, kNumProfiles> disagreement{};  // 100 - diagonal
  std::array<std::size_t, kNumProfiles> row_count{};
};

// Cross-tab of score profile vs model profile over the scored rows.
DisagreementMatrix disagreement_matrix(const metrics::PredictionSet& predictions,
                                       const RiskProfileTable& table = RiskProfileTable::industry());

struct CellRate {
  RiskProfile score_profile;
  RiskProfile model_profile;
  std::size_t n = 0;
  double realized = 0.0;   // mean label
  double predicted = 0.0;  // mean p_hat
  bool sparse = false;     // below the minimum reporting count
};

// Realized and predicted default rates per (score profile, model profile)
// cell. Cells under min_count are flagged, not dropped.
std::vector<CellRate> default_by_cell(const metrics::PredictionSet& predictions,
                                      const RiskProfileTable& table = RiskProfileTable::industry(),
                                      std::size_t min_count = 30);

}  // namespace credkit::profiles
