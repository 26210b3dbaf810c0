#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "credkit/panel.hpp"

namespace credkit::linkage {

enum class Source { bureau, hmda };
enum class Purpose { purchase, refinance };
enum class LoanType { conventional, fha, va };

// One mortgage record from either side of the match. Bureau geography is
// ZCTA5; raw HMDA geography is a census tract until crosswalk expansion.
// HMDA amounts are integer thousands; bureau amounts are currency.
struct MortgageRecord {
  Source source = Source::bureau;
  std::string record_id;
  int origination_year = 0;
  std::string geo;
  double loan_amount = 0.0;
  Purpose purpose = Purpose::purchase;
  LoanType loan_type = LoanType::conventional;
  std::string purchaser_type;
  std::optional<panel::Race> race;
  std::optional<double> income;
  std::optional<std::string> surname;  // BISG input when present
};

const char* purpose_token(Purpose p);
const char* loan_type_token(LoanType t);
std::optional<Purpose> parse_purpose(std::string_view token);
std::optional<LoanType> parse_loan_type(std::string_view token);

// The six matching characteristics, with the balance held separately so the
// +-1 thousand window can be applied.
struct MatchKey {
  int origination_year = 0;
  std::string geo;
  Purpose purpose = Purpose::purchase;
  LoanType loan_type = LoanType::conventional;
  std::string purchaser_type;
  auto operator<=>(const MatchKey&) const = default;
};
MatchKey match_key(const MortgageRecord& r);

// Bureau currency rounded to the nearest thousand, for the amount window.
long long amount_thousands(const MortgageRecord& r);

// Removes every record belonging to a duplicate key-group (drop-all).
// The key includes the rounded amount, i.e. all six matching variables.
struct DedupResult {
  std::vector<MortgageRecord> kept;
  std::size_t removed = 0;
};
DedupResult dedup_exact(const std::vector<MortgageRecord>& records);

struct CrosswalkEntry {
  std::string tract_id;
  std::string zcta5;
  double allocation_weight = 1.0;
};

// One output record per (record, mapped ZCTA5); reports how many inputs
// mapped to 1, 2, 3, 4, and >4 ZCTAs.
struct ExpandResult {
  std::vector<MortgageRecord> records;
  std::map<int, std::size_t> multiplicity_counts;  // key 5 aggregates >4
  std::size_t unmatched_tracts = 0;
};
ExpandResult expand_crosswalk(const std::vector<MortgageRecord>& hmda,
                              const std::vector<CrosswalkEntry>& crosswalk);

struct MatchResult {
  std::vector<std::pair<std::string, std::string>> pairs;  // (bureau_id, hmda_id)
  double match_rate = 0.0;  // |pairs| / |bureau records in scope|
  std::size_t bureau_in_scope = 0;
  std::size_t ambiguous_dropped = 0;  // candidate edges discarded for ambiguity
};

// Exact join on the five categorical keys with the bureau balance matching
// the HMDA integer amount within +-1 thousand. Only unambiguous one-to-one
// pairs survive: any record with several candidates is discarded and counted.
// Symmetric in its inputs by construction.
MatchResult exact_match(const std::vector<MortgageRecord>& bureau,
                        const std::vector<MortgageRecord>& hmda_expanded);

// Conservative lower bound on the achievable match rate: the product of the
// four coverage/uniqueness/crosswalk/conflict-survival factors.
double match_rate_bound(const std::array<double, 4>& factors);

// BISG posterior: u_i = p(i|j) * r(k|i), normalized. Throws
// AllZeroLikelihood when the update has no mass anywhere.
std::array<double, 6> bisg_posterior(const std::array<double, 6>& surname_prior_row,
                                     const std::array<double, 6>& geo_likelihood_row);

struct BisgTables {
  std::map<std::string, std::array<double, 6>> surname_prior;   // rows sum to 1
  std::map<std::string, std::array<double, 6>> geo_likelihood;  // r(k|i) per ZCTA
};

// CSV schemas: `surname,p_white,p_black,p_hispanic,p_asian,p_aian,p_nhpi` and
// `zcta5,r_white,r_black,r_hispanic,r_asian,r_aian,r_nhpi`.
BisgTables load_bisg_tables(const std::string& surname_path, const std::string& geo_path);

// Record CSVs. Bureau:
//   record_id,origination_year,zcta5,loan_amount,purpose,loan_type,purchaser_type,surname
// HMDA:
//   record_id,origination_year,tract,loan_amount,purpose,loan_type,purchaser_type,race,income
// Crosswalk: tract,zcta5,weight
std::vector<MortgageRecord> load_bureau_records(const std::string& path);
std::vector<MortgageRecord> load_hmda_records(const std::string& path);
std::vector<CrosswalkEntry> load_crosswalk(const std::string& path);

}  // namespace credkit::linkage
