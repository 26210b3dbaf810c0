#include "credkit/profiles.hpp"

#include <algorithm>
#include <map>

#include "credkit/errors.hpp"

namespace credkit::profiles {

const char* profile_label(RiskProfile p) {
  switch (p) {
    case RiskProfile::deep_subprime: return "Deep Subprime";
    case RiskProfile::subprime: return "Subprime";
    case RiskProfile::near_prime: return "Near Prime";
    case RiskProfile::prime: return "Prime";
    case RiskProfile::super_prime: return "Super Prime";
  }
  return "";
}

const RiskProfileTable& RiskProfileTable::industry() {
  static const RiskProfileTable table;
  return table;
}

std::array<double, 4> RiskProfileTable::share_cutoffs() const {
  std::array<double, 4> out{};
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    acc += population_shares[i];
    out[i] = acc;
  }
  return out;
}

RiskProfile score_to_profile(int score, const RiskProfileTable& table) {
  for (std::size_t i = 0; i < kNumProfiles; ++i) {
    if (score >= table.score_lo[i] && score <= table.score_hi[i]) {
      return static_cast<RiskProfile>(i);
    }
  }
  fail(Errc::out_of_range, "credit score " + std::to_string(score) + " outside [300, 850]");
}

RiskProfile rank_to_profile(double percentile, const std::array<double, 4>& cutoffs) {
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    fail(Errc::out_of_range, "percentile must lie in (0, 100]");
  }
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (percentile <= cutoffs[i]) return static_cast<RiskProfile>(i);
  }
  return RiskProfile::super_prime;
}

RiskProfile rank_to_profile(double percentile, const RiskProfileTable& table) {
  return rank_to_profile(percentile, table.percentile_cutoffs);
}

std::vector<RiskProfile> assign_model_profiles(const metrics::PredictionSet& predictions,
                                               const RiskProfileTable& table) {
  const std::array<double, 4> cutoffs = table.share_cutoffs();
  std::vector<RiskProfile> out(predictions.size(), RiskProfile::super_prime);

  std::map<int, std::vector<std::size_t>> by_quarter;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    by_quarter[predictions[i].quarter].push_back(i);
  }
  std::vector<double> safety;
  for (const auto& [q, idx] : by_quarter) {
    safety.clear();
    safety.reserve(idx.size());
    for (std::size_t i : idx) safety.push_back(1.0 - predictions[i].p_hat);
    const std::vector<double> pct = metrics::percentile(safety);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out[idx[k]] = rank_to_profile(pct[k], cutoffs);
    }
  }
  return out;
}

DisagreementMatrix disagreement_matrix(const metrics::PredictionSet& predictions,
                                       const RiskProfileTable& table) {
  // Scored rows only; model profiles are assigned per quarter over the same
  // scored subset so both rankings cover one population.
  metrics::PredictionSet scored;
  scored.reserve(predictions.size());
  for (const auto& row : predictions) {
    if (row.credit_score) scored.push_back(row);
  }
  if (scored.empty()) fail(Errc::empty_input, "disagreement_matrix: no scored rows");

  const std::vector<RiskProfile> model_profile = assign_model_profiles(scored, table);

  std::array<std::array<std::size_t, kNumProfiles>, kNumProfiles> counts{};
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const RiskProfile sp = score_to_profile(*scored[i].credit_score, table);
    counts[static_cast<std::size_t>(sp)][static_cast<std::size_t>(model_profile[i])] += 1;
  }

  DisagreementMatrix dm;
  for (std::size_t r = 0; r < kNumProfiles; ++r) {
    std::size_t total = 0;
    for (std::size_t c = 0; c < kNumProfiles; ++c) total += counts[r][c];
    dm.row_count[r] = total;
    if (total == 0) continue;  // empty row stays all-zero
    for (std::size_t c = 0; c < kNumProfiles; ++c) {
      dm.row_pct[r][c] = 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(total);
    }
    dm.disagreement[r] = 100.0 - dm.row_pct[r][r];
  }
  return dm;
}

std::vector<CellRate> default_by_cell(const metrics::PredictionSet& predictions,
                                      const RiskProfileTable& table, std::size_t min_count) {
  metrics::PredictionSet scored;
  scored.reserve(predictions.size());
  for (const auto& row : predictions) {
    if (row.credit_score) scored.push_back(row);
  }
  if (scored.empty()) fail(Errc::empty_input, "default_by_cell: no scored rows");

  const std::vector<RiskProfile> model_profile = assign_model_profiles(scored, table);

  struct Acc {
    std::size_t n = 0;
    double y = 0.0;
    double p = 0.0;
  };
  std::array<std::array<Acc, kNumProfiles>, kNumProfiles> acc{};
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto sp = static_cast<std::size_t>(score_to_profile(*scored[i].credit_score, table));
    const auto mp = static_cast<std::size_t>(model_profile[i]);
    acc[sp][mp].n += 1;
    acc[sp][mp].y += scored[i].label;
    acc[sp][mp].p += scored[i].p_hat;
  }

  std::vector<CellRate> out;
  for (std::size_t sp = 0; sp < kNumProfiles; ++sp) {
    for (std::size_t mp = 0; mp < kNumProfiles; ++mp) {
      const Acc& a = acc[sp][mp];
      if (a.n == 0) continue;
      CellRate cell;
      cell.score_profile = static_cast<RiskProfile>(sp);
      cell.model_profile = static_cast<RiskProfile>(mp);
      cell.n = a.n;
      cell.realized = a.y / static_cast<double>(a.n);
      cell.predicted = a.p / static_cast<double>(a.n);
      cell.sparse = a.n < min_count;
      out.push_back(cell);
    }
  }
  return out;
}

}  // namespace credkit::profiles
