#include "credkit/costs.hpp"

#include <cmath>

#include "credkit/csv.hpp"
#include "credkit/errors.hpp"

namespace credkit::costs {

double RateTable::card_rate(profiles::RiskProfile p) const {
  auto it = card_apr.find(p);
  if (it == card_apr.end()) {
    fail(Errc::missing_rate, std::string("no card APR configured for profile '") +
                                 profiles::profile_label(p) + "'");
  }
  return it->second;
}

double RateTable::mortgage_rate(double percentile, double balance) const {
  for (const auto& band : mortgage) {
    const bool pct_ok = percentile >= band.percentile_lo &&
                        (percentile < band.percentile_hi ||
                         (band.percentile_hi >= 100.0 && percentile <= band.percentile_hi));
    const bool bal_ok = balance >= band.balance_lo &&
                        (balance < band.balance_hi || (balance <= band.balance_hi && band.balance_hi >= 1e12));
    if (pct_ok && bal_ok) return band.rate;
  }
  fail(Errc::missing_rate, "no mortgage rate configured for percentile " +
                               csv::format_fixed(percentile, 2) + ", balance " +
                               csv::format_fixed(balance, 0));
}

RateTable load_card_rates(const std::string& path) {
  csv::Reader reader(path);
  const std::size_t c_profile = reader.column("profile");
  const std::size_t c_apr = reader.column("apr");
  RateTable table;
  for (std::size_t i = 0; i < reader.rows.size(); ++i) {
    const auto& row = reader.rows[i];
    const std::size_t line = reader.row_lines[i];
    bool known = false;
    for (std::size_t p = 0; p < profiles::kNumProfiles; ++p) {
      const auto rp = static_cast<profiles::RiskProfile>(p);
      if (row[c_profile] == profiles::profile_label(rp)) {
        table.card_apr[rp] = csv::parse_double(row[c_apr], line, "apr");
        known = true;
        break;
      }
    }
    if (!known) {
      fail(Errc::parse_error, path + " line " + std::to_string(line) + ": unknown profile '" +
                                  row[c_profile] + "'");
    }
  }
  return table;
}

void load_mortgage_rates(RateTable& table, const std::string& path) {
  csv::Reader reader(path);
  const std::size_t c_plo = reader.column("percentile_lo");
  const std::size_t c_phi = reader.column("percentile_hi");
  const std::size_t c_blo = reader.column("balance_lo");
  const std::size_t c_bhi = reader.column("balance_hi");
  const std::size_t c_rate = reader.column("rate");
  for (std::size_t i = 0; i < reader.rows.size(); ++i) {
    const auto& row = reader.rows[i];
    const std::size_t line = reader.row_lines[i];
    RateTable::MortgageBand band;
    band.percentile_lo = csv::parse_double(row[c_plo], line, "percentile_lo");
    band.percentile_hi = csv::parse_double(row[c_phi], line, "percentile_hi");
    band.balance_lo = csv::parse_double(row[c_blo], line, "balance_lo");
    band.balance_hi = csv::parse_double(row[c_bhi], line, "balance_hi");
    band.rate = csv::parse_double(row[c_rate], line, "rate");
    table.mortgage.push_back(band);
  }
}

double card_annual_cost(double balance, double apr) {
  if (balance < 0.0) fail(Errc::negative_balance, "card_annual_cost: balance must be >= 0");
  return balance * apr;
}

double mortgage_payment(double principal, double annual_rate, int n_months) {
  if (n_months < 1) fail(Errc::invalid_term, "mortgage_payment: n_months must be >= 1");
  if (!(principal > 0.0)) fail(Errc::invalid_term, "mortgage_payment: principal must be positive");
  const double r = annual_rate / 12.0;
  if (r == 0.0) return principal / static_cast<double>(n_months);
  const double growth = std::pow(1.0 + r, static_cast<double>(n_months));
  return principal * r * growth / (growth - 1.0);
}

MortgageDelta mortgage_delta(double principal, double rate_a, double rate_b, int n_months) {
  const double pay_a = mortgage_payment(principal, rate_a, n_months);
  const double pay_b = mortgage_payment(principal, rate_b, n_months);
  MortgageDelta d;
  d.annual_delta = 12.0 * (pay_a - pay_b);
  d.cumulative = static_cast<double>(n_months) * (pay_a - pay_b);
  d.share_of_balance = d.cumulative / principal;
  return d;
}

CostReport misclassification_cost_matrix(const std::vector<CostRow>& rows, const RateTable& table,
                                         Product product, int n_months) {
  CostReport report;
  report.product = product;
  report.n_months = n_months;

  for (const auto& row : rows) {
    if (product == Product::mortgage && !(row.balance > 0.0)) continue;  // no mortgage to price
    const auto sp = static_cast<std::size_t>(row.score_profile);
    const auto mp = static_cast<std::size_t>(row.model_profile);
    CostCell& cell = report.cells[sp][mp];
    cell.n += 1;
    if (sp == mp) continue;  // zero delta on the diagonal

    if (product == Product::card) {
      const double cost_score = card_annual_cost(row.balance, table.card_rate(row.score_profile));
      const double cost_model = card_annual_cost(row.balance, table.card_rate(row.model_profile));
      const double annual = cost_score - cost_model;
      cell.annual_delta += annual;
      cell.cumulative += annual;  // per-year product: cumulative == annual
      cell.share_of_balance += row.balance > 0.0 ? annual / row.balance : 0.0;
    } else {
      const double rate_score = table.mortgage_rate(row.score_percentile, row.balance);
      const double rate_model = table.mortgage_rate(row.model_percentile, row.balance);
      const MortgageDelta d = mortgage_delta(row.balance, rate_score, rate_model, n_months);
      cell.annual_delta += d.annual_delta;
      cell.cumulative += d.cumulative;
      cell.share_of_balance += d.share_of_balance;
    }
  }

  for (auto& row : report.cells) {
    for (auto& cell : row) {
      if (cell.n == 0) continue;
      const double n = static_cast<double>(cell.n);
      cell.annual_delta /= n;
      cell.cumulative /= n;
      cell.share_of_balance /= n;
    }
  }
  return report;
}

}  // namespace credkit::costs
