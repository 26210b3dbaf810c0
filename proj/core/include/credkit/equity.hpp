#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "credkit/metrics.hpp"
#include "credkit/panel.hpp"
#include "credkit/regression.hpp"
#include "credkit/synthetic.hpp"

namespace credkit::equity {

// ---------------------------------------------------------------------------
// Ranking differences
// ---------------------------------------------------------------------------

struct KeyedRank {
  std::string consumer_id;
  int quarter = 0;
  double rank = 0.0;
};

struct RankDiff {
  std::string consumer_id;
  int quarter = 0;
  double diff = 0.0;  // model percentile - score percentile; positive = model sees less risk
};

// Per-row model-minus-score percentile difference. Throws KeyMismatch unless
// both rankings cover exactly the same (consumer, quarter) keys.
std::vector<RankDiff> ranking_difference(std::span<const KeyedRank> model_rank,
                                         std::span<const KeyedRank> score_rank);

// ---------------------------------------------------------------------------
// Group performance
// ---------------------------------------------------------------------------

struct GroupAucRow {
  std::string group;
  std::size_t n = 0;
  std::size_t n_scored = 0;
  std::optional<double> auc_model;  // absent when labels are single-class
  std::optional<double> auc_score;  // score ranking, scored rows only
};

// metrics::auc within each stratum, for the model probability and for the
// credit score used as a (negated) ranking.
std::vector<GroupAucRow> group_auc(const metrics::PredictionSet& predictions,
                                   std::span<const std::string> group_of_row);

// ---------------------------------------------------------------------------
// Feature composition cells
// ---------------------------------------------------------------------------

// Column mapping for the 2x2x2 stratification; defaults follow the synthetic
// schema and can be re-pointed for user panels.
struct CompositionConfig {
  std::size_t history_years_feature = panel::kFeatHistoryYears;
  std::size_t product_types_feature = panel::kFeatProductTypes;
  std::size_t mortgage_feature = panel::kFeatHasMortgage;
  double thin_years = 10.0;  // thin file iff history < 10y or products < 3
  double thin_products = 3.0;
};

struct CompositionCell {
  bool delinquent = false;
  bool thin_file = false;
  bool mortgage = false;
  int index() const { return (delinquent ? 1 : 0) | (thin_file ? 2 : 0) | (mortgage ? 4 : 0); }
};

CompositionCell composition_cell(const panel::ConsumerQuarter& record,
                                 const CompositionConfig& config = {});

struct CompositionShares {
  std::size_t n = 0;
  // Within-group shares; each binary pair sums to 1.
  double current = 0.0, delinquent = 0.0;
  double thin = 0.0, thick = 0.0;
  double mortgage = 0.0, no_mortgage = 0.0;
  std::array<double, 8> cell_shares{};  // full 2x2x2 distribution
};

struct CompositionByGroup {
  CompositionShares marginalized;
  CompositionShares reference;
};

CompositionByGroup composition_shares(
    const panel::Panel& panel,
    const std::function<bool(const panel::ConsumerQuarter&)>& marginalized,
    const CompositionConfig& config = {});

// ---------------------------------------------------------------------------
// Counterfactual AUC
// ---------------------------------------------------------------------------

// Mann-Whitney AUC with per-observation weights; ties counted 1/2. With unit
// weights this equals metrics::auc exactly.
double weighted_auc(std::span<const double> score, std::span<const int> label,
                    std::span<const double> weight);

struct CounterfactualResult {
  double actual_auc = 0.0;
  double counterfactual_auc = 0.0;
  double gap = 0.0;               // counterfactual - actual
  std::vector<int> flagged_cells;  // reference cells without marginalized support
};

// Reweights the marginalized group to the reference group's composition-cell
// distribution and recomputes its AUC. Reference cells with no marginalized
// observation are flagged and the reference shares renormalized over the
// supported cells.
CounterfactualResult counterfactual_auc(std::span<const double> p_hat, std::span<const int> label,
                                        std::span<const int> cell, std::span<const char> in_group);

// ---------------------------------------------------------------------------
// Ranking-difference regressions (vulnerable populations)
// ---------------------------------------------------------------------------

struct VulnerableOptions {
  bool include_default = true;
  bool include_group = true;
  bool include_interaction = true;
  ClusterMode cluster_mode = ClusterMode::two_way;  // geography and quarter
};

// Builds the regression design for the ranking-difference specification:
// DV = model percentile - score percentile (per quarter, scored rows),
// regressors per the options, geography x quarter fixed effects, and
// (geography, quarter) cluster keys.
RegressionData vulnerable_design(const panel::Panel& panel,
                                 const metrics::PredictionSet& predictions,
                                 const std::function<bool(const panel::ConsumerQuarter&)>& marginalized,
                                 const VulnerableOptions& options = {});

// ---------------------------------------------------------------------------
// Access-to-credit regressions
// ---------------------------------------------------------------------------

inline constexpr std::array<int, 7> kAgeBinEdges = {18, 30, 40, 50, 60, 70, 200};
inline constexpr std::size_t kNumAgeBins = 6;
int age_bin(int age);

struct AccessSpec {
  std::size_t outcome_feature = panel::kFeatCardLimit;
  bool outcome_as_indicator = false;          // y = 1{feature > 0}
  std::optional<std::size_t> gate_feature;    // keep rows with gate > 0 at t or t-1
  // Aggregate age-bin distribution used for the adjustment; all-zero means
  // use the empirical shares of the estimation sample.
  std::array<double, kNumAgeBins> age_shares{};
  ClusterMode cluster_mode = ClusterMode::one_way;  // by geography
};

struct QuarterProfileEffect {
  int quarter = 0;
  int profile = 0;
  double coef = 0.0;
  double age_adjusted_level = 0.0;
};

struct AccessResult {
  RegressionResult regression;
  std::array<double, 5> age_adjusted_levels{};  // per risk profile
  std::vector<QuarterProfileEffect> time_effects;
  std::array<double, kNumAgeBins> age_shares_used{};
};

// Regression of the outcome at quarter t on the credit-score risk profile at
// t-1, age-bin indicators, quarter x profile interactions, and geography
// fixed effects. The age-adjusted profile level is the grand-mean constant
// plus the profile coefficient plus the share-weighted age-bin effects.
AccessResult access_regression(const panel::Panel& panel, const AccessSpec& spec);

}  // namespace credkit::equity
