#include "credkit/linkage.hpp"

#include <algorithm>
#include <cmath>

#include "credkit/csv.hpp"
#include "credkit/errors.hpp"

namespace credkit::linkage {

const char* purpose_token(Purpose p) { return p == Purpose::purchase ? "purchase" : "refinance"; }

const char* loan_type_token(LoanType t) {
  switch (t) {
    case LoanType::conventional: return "conventional";
    case LoanType::fha: return "fha";
    case LoanType::va: return "va";
  }
  return "";
}

std::optional<Purpose> parse_purpose(std::string_view token) {
  if (token == "purchase") return Purpose::purchase;
  if (token == "refinance") return Purpose::refinance;
  return std::nullopt;
}

std::optional<LoanType> parse_loan_type(std::string_view token) {
  if (token == "conventional") return LoanType::conventional;
  if (token == "fha") return LoanType::fha;
  if (token == "va") return LoanType::va;
  return std::nullopt;
}

MatchKey match_key(const MortgageRecord& r) {
  return {r.origination_year, r.geo, r.purpose, r.loan_type, r.purchaser_type};
}

long long amount_thousands(const MortgageRecord& r) {
  if (r.source == Source::hmda) return static_cast<long long>(std::llround(r.loan_amount));
  return static_cast<long long>(std::llround(r.loan_amount / 1000.0));
}

DedupResult dedup_exact(const std::vector<MortgageRecord>& records) {
  std::map<std::pair<MatchKey, long long>, std::size_t> group_size;
  for (const auto& r : records) group_size[{match_key(r), amount_thousands(r)}] += 1;

  DedupResult out;
  for (const auto& r : records) {
    if (group_size[{match_key(r), amount_thousands(r)}] == 1) {
      out.kept.push_back(r);
    } else {
      out.removed += 1;
    }
  }
  return out;
}

ExpandResult expand_crosswalk(const std::vector<MortgageRecord>& hmda,
                              const std::vector<CrosswalkEntry>& crosswalk) {
  std::map<std::string, std::vector<const CrosswalkEntry*>> by_tract;
  for (const auto& e : crosswalk) by_tract[e.tract_id].push_back(&e);

  ExpandResult out;
  for (const auto& r : hmda) {
    auto it = by_tract.find(r.geo);
    if (it == by_tract.end()) {
      out.unmatched_tracts += 1;
      continue;
    }
    const int k = static_cast<int>(it->second.size());
    out.multiplicity_counts[std::min(k, 5)] += 1;
    for (const CrosswalkEntry* e : it->second) {
      MortgageRecord copy = r;
      copy.geo = e->zcta5;
      out.records.push_back(std::move(copy));
    }
  }
  return out;
}

MatchResult exact_match(const std::vector<MortgageRecord>& bureau,
                        const std::vector<MortgageRecord>& hmda_expanded) {
  MatchResult out;
  out.bureau_in_scope = bureau.size();
  if (bureau.empty() || hmda_expanded.empty()) {
    out.match_rate = 0.0;
    return out;
  }

  // Candidate edges: same categorical key, amounts within +-1 thousand.
  // Only edges where both endpoints have degree one survive, which makes the
  // operation symmetric and the output one-to-one.
  std::map<std::pair<MatchKey, long long>, std::vector<std::size_t>> hmda_index;
  for (std::size_t j = 0; j < hmda_expanded.size(); ++j) {
    hmda_index[{match_key(hmda_expanded[j]), amount_thousands(hmda_expanded[j])}].push_back(j);
  }

  std::vector<std::size_t> bureau_degree(bureau.size(), 0);
  std::vector<std::size_t> hmda_degree(hmda_expanded.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < bureau.size(); ++i) {
    const MatchKey key = match_key(bureau[i]);
    const long long amount = amount_thousands(bureau[i]);
    for (long long delta = -1; delta <= 1; ++delta) {
      auto it = hmda_index.find({key, amount + delta});
      if (it == hmda_index.end()) continue;
      for (std::size_t j : it->second) {
        edges.emplace_back(i, j);
        bureau_degree[i] += 1;
        hmda_degree[j] += 1;
      }
    }
  }

  for (const auto& [i, j] : edges) {
    if (bureau_degree[i] == 1 && hmda_degree[j] == 1) {
      out.pairs.emplace_back(bureau[i].record_id, hmda_expanded[j].record_id);
    } else {
      out.ambiguous_dropped += 1;
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  out.match_rate = static_cast<double>(out.pairs.size()) / static_cast<double>(out.bureau_in_scope);
  return out;
}

double match_rate_bound(const std::array<double, 4>& factors) {
  double bound = 1.0;
  for (double f : factors) {
    if (f < 0.0 || f > 1.0) fail(Errc::invalid_config, "match_rate_bound: factors must lie in [0, 1]");
    bound *= f;
  }
  return bound;
}

std::array<double, 6> bisg_posterior(const std::array<double, 6>& surname_prior_row,
                                     const std::array<double, 6>& geo_likelihood_row) {
  std::array<double, 6> u{};
  double total = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    if (surname_prior_row[i] < 0.0 || geo_likelihood_row[i] < 0.0) {
      fail(Errc::invalid_config, "bisg_posterior: negative probability input");
    }
    u[i] = surname_prior_row[i] * geo_likelihood_row[i];
    total += u[i];
  }
  if (total <= 0.0) fail(Errc::all_zero_likelihood, "bisg_posterior: update has zero mass everywhere");
  for (double& v : u) v /= total;
  return u;
}

namespace {

std::array<double, 6> parse_six(const std::vector<std::string>& row, std::size_t first,
                                std::size_t line) {
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) {
    out[i] = csv::parse_double(row[first + i], line, "probability");
  }
  return out;
}

}  // namespace

namespace {

MortgageRecord parse_record(const csv::Reader& reader, std::size_t row_idx, Source source,
                            std::size_t c_id, std::size_t c_year, std::size_t c_geo,
                            std::size_t c_amount, std::size_t c_purpose, std::size_t c_type,
                            std::size_t c_purchaser) {
  const auto& row = reader.rows[row_idx];
  const std::size_t line = reader.row_lines[row_idx];
  MortgageRecord r;
  r.source = source;
  r.record_id = row[c_id];
  r.origination_year = static_cast<int>(csv::parse_int(row[c_year], line, "origination_year"));
  r.geo = row[c_geo];
  r.loan_amount = csv::parse_double(row[c_amount], line, "loan_amount");
  if (!(r.loan_amount > 0.0)) {
    fail(Errc::invariant_violation, "line " + std::to_string(line) + ": loan_amount must be positive");
  }
  const auto purpose = parse_purpose(row[c_purpose]);
  if (!purpose) fail(Errc::parse_error, "line " + std::to_string(line) + ": unknown purpose '" + row[c_purpose] + "'");
  r.purpose = *purpose;
  const auto type = parse_loan_type(row[c_type]);
  if (!type) fail(Errc::parse_error, "line " + std::to_string(line) + ": unknown loan_type '" + row[c_type] + "'");
  r.loan_type = *type;
  r.purchaser_type = row[c_purchaser];
  return r;
}

}  // namespace

std::vector<MortgageRecord> load_bureau_records(const std::string& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("record_id");
  const std::size_t c_year = reader.column("origination_year");
  const std::size_t c_geo = reader.column("zcta5");
  const std::size_t c_amount = reader.column("loan_amount");
  const std::size_t c_purpose = reader.column("purpose");
  const std::size_t c_type = reader.column("loan_type");
  const std::size_t c_purchaser = reader.column("purchaser_type");
  const auto c_surname = reader.optional_column("surname");
  std::vector<MortgageRecord> out;
  out.reserve(reader.rows.size());
  for (std::size_t i = 0; i < reader.rows.size(); ++i) {
    MortgageRecord r = parse_record(reader, i, Source::bureau, c_id, c_year, c_geo, c_amount,
                                    c_purpose, c_type, c_purchaser);
    if (c_surname && !reader.rows[i][*c_surname].empty()) r.surname = reader.rows[i][*c_surname];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MortgageRecord> load_hmda_records(const std::string& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("record_id");
  const std::size_t c_year = reader.column("origination_year");
  const std::size_t c_geo = reader.column("tract");
  const std::size_t c_amount = reader.column("loan_amount");
  const std::size_t c_purpose = reader.column("purpose");
  const std::size_t c_type = reader.column("loan_type");
  const std::size_t c_purchaser = reader.column("purchaser_type");
  const auto c_race = reader.optional_column("race");
  const auto c_income = reader.optional_column("income");
  std::vector<MortgageRecord> out;
  out.reserve(reader.rows.size());
  for (std::size_t i = 0; i < reader.rows.size(); ++i) {
    MortgageRecord r = parse_record(reader, i, Source::hmda, c_id, c_year, c_geo, c_amount,
                                    c_purpose, c_type, c_purchaser);
    if (c_race && !reader.rows[i][*c_race].empty()) r.race = panel::parse_race(reader.rows[i][*c_race]);
    if (c_income && !reader.rows[i][*c_income].empty()) {
      r.income = csv::parse_double(reader.rows[i][*c_income], reader.row_lines[i], "income");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CrosswalkEntry> load_crosswalk(const std::string& path) {
  csv::Reader reader(path);
  const std::size_t c_tract = reader.column("tract");
  const std::size_t c_zcta = reader.column("zcta5");
  const std::size_t c_weight = reader.column("weight");
  std::vector<CrosswalkEntry> out;
  out.reserve(reader.rows.size());
  for (std::size_t i = 0; i < reader.rows.size(); ++i) {
    CrosswalkEntry e;
    e.tract_id = reader.rows[i][c_tract];
    e.zcta5 = reader.rows[i][c_zcta];
    e.allocation_weight = csv::parse_double(reader.rows[i][c_weight], reader.row_lines[i], "weight");
    out.push_back(std::move(e));
  }
  return out;
}

BisgTables load_bisg_tables(const std::string& surname_path, const std::string& geo_path) {
  BisgTables tables;
  {
    csv::Reader reader(surname_path);
    const std::size_t c_name = reader.column("surname");
    const std::size_t c_first = reader.column("p_white");
    for (std::size_t i = 0; i < reader.rows.size(); ++i) {
      const auto row6 = parse_six(reader.rows[i], c_first, reader.row_lines[i]);
      double sum = 0.0;
      for (double v : row6) sum += v;
      if (std::abs(sum - 1.0) > 1e-6) {
        fail(Errc::invariant_violation, surname_path + " line " + std::to_string(reader.row_lines[i]) +
                                            ": surname prior row must sum to 1");
      }
      tables.surname_prior[reader.rows[i][c_name]] = row6;
    }
  }
  {
    csv::Reader reader(geo_path);
    const std::size_t c_zcta = reader.column("zcta5");
    const std::size_t c_first = reader.column("r_white");
    for (std::size_t i = 0; i < reader.rows.size(); ++i) {
      tables.geo_likelihood[reader.rows[i][c_zcta]] =
          parse_six(reader.rows[i], c_first, reader.row_lines[i]);
    }
  }
  return tables;
}

}  // namespace credkit::linkage
