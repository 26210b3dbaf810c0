#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "credkit/profiles.hpp"

namespace credkit::costs {

// Interest-rate lookups supplied as CSV config (the source tables are
// external data, never baked into code).
struct RateTable {
  std::map<profiles::RiskProfile, double> card_apr;

  struct MortgageBand {
    double percentile_lo = 0.0;
    double percentile_hi = 0.0;  // exclusive upper edge except the last band
    double balance_lo = 0.0;
    double balance_hi = 0.0;
    double rate = 0.0;
  };
  std::vector<MortgageBand> mortgage;

  double card_rate(profiles::RiskProfile p) const;                 // throws MissingRate
  double mortgage_rate(double percentile, double balance) const;   // throws MissingRate
};

// CSV schemas: `profile,apr` and
// `percentile_lo,percentile_hi,balance_lo,balance_hi,rate`.
RateTable load_card_rates(const std::string& path);
void load_mortgage_rates(RateTable& table, const std::string& path);

// balance * apr, per year. Throws NegativeBalance.
double card_annual_cost(double balance, double apr);

// Standard fixed-rate amortization payment; exact principal/n at zero rate.
// Throws InvalidTerm.
double mortgage_payment(double principal, double annual_rate, int n_months);

struct MortgageDelta {
  double annual_delta = 0.0;   // 12 * (payment_a - payment_b)
  double cumulative = 0.0;     // n_months * (payment_a - payment_b)
  double share_of_balance = 0.0;
};
MortgageDelta mortgage_delta(double principal, double rate_a, double rate_b, int n_months);

enum class Product { card, mortgage };

// One consumer row for the misclassification cost matrix.
struct CostRow {
  profiles::RiskProfile score_profile;
  profiles::RiskProfile model_profile;
  double balance = 0.0;
  double score_percentile = 0.0;  // mortgage lookups only
  double model_percentile = 0.0;
};

struct CostCell {
  std::size_t n = 0;
  double annual_delta = 0.0;      // mean; positive = saving under the model profile
  double cumulative = 0.0;
  double share_of_balance = 0.0;
};

struct CostReport {
  Product product = Product::card;
  int n_months = 360;
  // [score profile][model profile]
  std::array<std::array<CostCell, profiles::kNumProfiles>, profiles::kNumProfiles> cells{};
};

// Mean per-cell interest-cost difference between pricing at the score-based
// profile and at the model-based profile. Diagonal cells are zero by
// construction; swapping the two lookups negates the matrix.
CostReport misclassification_cost_matrix(const std::vector<CostRow>& rows, const RateTable& table,
                                         Product product, int n_months = 360);

}  // namespace credkit::costs
