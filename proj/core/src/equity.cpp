#include "credkit/equity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "credkit/errors.hpp"
#include "credkit/profiles.hpp"

namespace credkit::equity {

std::vector<RankDiff> ranking_difference(std::span<const KeyedRank> model_rank,
                                         std::span<const KeyedRank> score_rank) {
  if (model_rank.size() != score_rank.size()) {
    fail(Errc::key_mismatch, "ranking_difference: rankings differ in size");
  }
  std::map<std::pair<std::string, int>, double> score_by_key;
  for (const auto& r : score_rank) {
    if (!score_by_key.emplace(std::make_pair(r.consumer_id, r.quarter), r.rank).second) {
      fail(Errc::key_mismatch, "ranking_difference: duplicate key in score ranking");
    }
  }
  std::vector<RankDiff> out;
  out.reserve(model_rank.size());
  for (const auto& r : model_rank) {
    auto it = score_by_key.find({r.consumer_id, r.quarter});
    if (it == score_by_key.end()) {
      fail(Errc::key_mismatch,
           "ranking_difference: key (" + r.consumer_id + ", " + std::to_string(r.quarter) +
               ") missing from score ranking");
    }
    out.push_back({r.consumer_id, r.quarter, r.rank - it->second});
  }
  return out;
}

std::vector<GroupAucRow> group_auc(const metrics::PredictionSet& predictions,
                                   std::span<const std::string> group_of_row) {
  if (predictions.size() != group_of_row.size()) {
    fail(Errc::key_mismatch, "group_auc: group labels do not align with predictions");
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < predictions.size(); ++i) groups[group_of_row[i]].push_back(i);

  std::vector<GroupAucRow> out;
  for (const auto& [name, idx] : groups) {
    GroupAucRow row;
    row.group = name;
    row.n = idx.size();
    std::vector<double> p, s;
    std::vector<int> y, ys;
    for (std::size_t i : idx) {
      p.push_back(predictions[i].p_hat);
      y.push_back(predictions[i].label);
      if (predictions[i].credit_score) {
        // Negated: a higher score must mean a lower predicted risk.
        s.push_back(-static_cast<double>(*predictions[i].credit_score));
        ys.push_back(predictions[i].label);
      }
    }
    row.n_scored = s.size();
    const bool mixed = std::any_of(y.begin(), y.end(), [&](int v) { return v != y[0]; });
    if (mixed) row.auc_model = metrics::auc(p, y);
    const bool mixed_s = !ys.empty() && std::any_of(ys.begin(), ys.end(), [&](int v) { return v != ys[0]; });
    if (mixed_s) row.auc_score = metrics::auc(s, ys);
    out.push_back(std::move(row));
  }
  return out;
}

CompositionCell composition_cell(const panel::ConsumerQuarter& record, const CompositionConfig& config) {
  CompositionCell cell;
  cell.delinquent = record.d_state != 0;
  const double years = record.features[config.history_years_feature];
  const double products = record.features[config.product_types_feature];
  cell.thin_file = years < config.thin_years || products < config.thin_products;
  cell.mortgage = record.features[config.mortgage_feature] > 0.5;
  return cell;
}

namespace {

CompositionShares accumulate_shares(const std::vector<CompositionCell>& cells) {
  CompositionShares s;
  s.n = cells.size();
  if (cells.empty()) return s;
  for (const auto& c : cells) {
    s.delinquent += c.delinquent;
    s.thin += c.thin_file;
    s.mortgage += c.mortgage;
    s.cell_shares[static_cast<std::size_t>(c.index())] += 1.0;
  }
  const double n = static_cast<double>(s.n);
  s.delinquent /= n;
  s.thin /= n;
  s.mortgage /= n;
  s.current = 1.0 - s.delinquent;
  s.thick = 1.0 - s.thin;
  s.no_mortgage = 1.0 - s.mortgage;
  for (double& v : s.cell_shares) v /= n;
  return s;
}

}  // namespace

CompositionByGroup composition_shares(
    const panel::Panel& panel, const std::function<bool(const panel::ConsumerQuarter&)>& marginalized,
    const CompositionConfig& config) {
  std::vector<CompositionCell> in_group, rest;
  for (const auto& rec : panel.records) {
    (marginalized(rec) ? in_group : rest).push_back(composition_cell(rec, config));
  }
  CompositionByGroup out;
  out.marginalized = accumulate_shares(in_group);
  out.reference = accumulate_shares(rest);
  return out;
}

double weighted_auc(std::span<const double> score, std::span<const int> label,
                    std::span<const double> weight) {
  if (score.size() != label.size() || score.size() != weight.size()) {
    fail(Errc::key_mismatch, "weighted_auc: length mismatch");
  }
  if (score.empty()) fail(Errc::empty_input, "weighted_auc: no observations");

  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

  // Ascending scan: every positive collects the negative weight strictly
  // below it plus half the tied negative weight.
  double w_pos_total = 0.0, w_neg_total = 0.0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    (label[i] != 0 ? w_pos_total : w_neg_total) += weight[i];
  }
  if (w_pos_total <= 0.0 || w_neg_total <= 0.0) {
    fail(Errc::degenerate_labels, "weighted_auc: single-class labels");
  }

  double numer = 0.0;
  double neg_below = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double tie_pos = 0.0, tie_neg = 0.0;
    while (j < order.size() && score[order[j]] == score[order[i]]) {
      if (label[order[j]] != 0) {
        tie_pos += weight[order[j]];
      } else {
        tie_neg += weight[order[j]];
      }
      ++j;
    }
    numer += tie_pos * (neg_below + 0.5 * tie_neg);
    neg_below += tie_neg;
    i = j;
  }
  return numer / (w_pos_total * w_neg_total);
}

CounterfactualResult counterfactual_auc(std::span<const double> p_hat, std::span<const int> label,
                                        std::span<const int> cell, std::span<const char> in_group) {
  const std::size_t n = p_hat.size();
  if (label.size() != n || cell.size() != n || in_group.size() != n) {
    fail(Errc::key_mismatch, "counterfactual_auc: length mismatch");
  }

  std::array<double, 8> marg_count{}, ref_count{};
  double n_marg = 0.0, n_ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(cell[i]);
    if (c >= 8) fail(Errc::out_of_range, "counterfactual_auc: cell index outside 0..7");
    if (in_group[i]) {
      marg_count[c] += 1.0;
      n_marg += 1.0;
    } else {
      ref_count[c] += 1.0;
      n_ref += 1.0;
    }
  }
  if (n_marg == 0.0 || n_ref == 0.0) {
    fail(Errc::empty_input, "counterfactual_auc: both groups must be non-empty");
  }

  CounterfactualResult res;
  // Reference cells without marginalized support cannot be reweighted;
  // flag them and renormalize the reference distribution over the rest.
  double ref_supported = 0.0;
  for (std::size_t c = 0; c < 8; ++c) {
    if (ref_count[c] > 0.0 && marg_count[c] == 0.0) {
      res.flagged_cells.push_back(static_cast<int>(c));
    } else {
      ref_supported += ref_count[c];
    }
  }
  if (ref_supported <= 0.0) {
    fail(Errc::empty_input, "counterfactual_auc: no reference cell has marginalized support");
  }

  std::array<double, 8> w_cell{};
  for (std::size_t c = 0; c < 8; ++c) {
    if (marg_count[c] == 0.0) continue;
    const double ref_share = ref_count[c] / ref_supported;
    const double marg_share = marg_count[c] / n_marg;
    w_cell[c] = ref_share / marg_share;
  }

  std::vector<double> p, w_actual, w_cf;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_group[i]) continue;
    p.push_back(p_hat[i]);
    y.push_back(label[i]);
    w_actual.push_back(1.0);
    w_cf.push_back(w_cell[static_cast<std::size_t>(cell[i])]);
  }
  res.actual_auc = weighted_auc(p, y, w_actual);
  res.counterfactual_auc = weighted_auc(p, y, w_cf);
  res.gap = res.counterfactual_auc - res.actual_auc;
  return res;
}

RegressionData vulnerable_design(const panel::Panel& panel,
                                 const metrics::PredictionSet& predictions,
                                 const std::function<bool(const panel::ConsumerQuarter&)>& marginalized,
                                 const VulnerableOptions& options) {
  // Scored rows only, percentiles per quarter over that same population.
  std::vector<std::size_t> scored;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].credit_score) scored.push_back(i);
  }
  if (scored.empty()) fail(Errc::empty_input, "vulnerable_design: no scored predictions");

  std::map<int, std::vector<std::size_t>> by_quarter;  // positions into `scored`
  for (std::size_t k = 0; k < scored.size(); ++k) {
    by_quarter[predictions[scored[k]].quarter].push_back(k);
  }

  std::vector<double> diff(scored.size());
  for (const auto& [q, idx] : by_quarter) {
    std::vector<double> safety, score;
    safety.reserve(idx.size());
    score.reserve(idx.size());
    for (std::size_t k : idx) {
      safety.push_back(1.0 - predictions[scored[k]].p_hat);
      score.push_back(static_cast<double>(*predictions[scored[k]].credit_score));
    }
    const std::vector<double> model_pct = metrics::percentile(safety);
    const std::vector<double> score_pct = metrics::percentile(score);
    for (std::size_t j = 0; j < idx.size(); ++j) diff[idx[j]] = model_pct[j] - score_pct[j];
  }

  RegressionData data;
  const std::size_t n = scored.size();
  std::size_t n_cols = 0;
  if (options.include_default) ++n_cols;
  if (options.include_group) ++n_cols;
  if (options.include_interaction) ++n_cols;
  data.X = Matrix(n, n_cols);
  data.y = diff;
  if (options.include_default) data.names.push_back("default");
  if (options.include_group) data.names.push_back("group");
  if (options.include_interaction) data.names.push_back("group_x_default");

  std::map<std::string, std::int32_t> geo_ids;
  std::map<std::pair<std::string, int>, std::int32_t> geo_quarter_ids;
  std::vector<std::int32_t> fe(n), cl_geo(n), cl_quarter(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& pred = predictions[scored[k]];
    const auto rec_idx = panel.find(pred.consumer_id, pred.quarter);
    if (!rec_idx) {
      fail(Errc::key_mismatch, "vulnerable_design: prediction row (" + pred.consumer_id + ", " +
                                   std::to_string(pred.quarter) + ") not in panel");
    }
    const auto& rec = panel.records[*rec_idx];
    const double z = pred.label;
    const double x = marginalized(rec) ? 1.0 : 0.0;
    std::size_t col = 0;
    if (options.include_default) data.X.at(k, col++) = z;
    if (options.include_group) data.X.at(k, col++) = x;
    if (options.include_interaction) data.X.at(k, col++) = x * z;

    auto git = geo_ids.find(rec.zip);
    if (git == geo_ids.end()) git = geo_ids.emplace(rec.zip, static_cast<std::int32_t>(geo_ids.size())).first;
    cl_geo[k] = git->second;
    cl_quarter[k] = pred.quarter;
    auto gq = geo_quarter_ids.find({rec.zip, pred.quarter});
    if (gq == geo_quarter_ids.end()) {
      gq = geo_quarter_ids.emplace(std::make_pair(rec.zip, pred.quarter),
                                   static_cast<std::int32_t>(geo_quarter_ids.size()))
               .first;
    }
    fe[k] = gq->second;
  }
  data.fixed_effects.push_back(std::move(fe));
  data.clusters.push_back(std::move(cl_geo));
  data.clusters.push_back(std::move(cl_quarter));
  return data;
}

int age_bin(int age) {
  for (std::size_t b = 0; b + 1 < kAgeBinEdges.size(); ++b) {
    if (age < kAgeBinEdges[b + 1]) return static_cast<int>(b);
  }
  return static_cast<int>(kNumAgeBins) - 1;
}

AccessResult access_regression(const panel::Panel& panel, const AccessSpec& spec) {
  if (spec.outcome_feature >= panel::kNumFeatures) {
    fail(Errc::invalid_config, "access_regression: outcome feature out of range");
  }

  // Estimation rows: outcome at t, risk profile from the credit score at t-1.
  struct Row {
    std::size_t rec = 0;
    int profile = 0;
    int bin = 0;
    int quarter = 0;
  };
  std::vector<Row> rows;
  std::set<int> quarters;
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const auto& rec = panel.records[i];
    const auto prev = panel.find(rec.consumer_id, rec.quarter - 1);
    if (!prev) continue;
    const auto& lag = panel.records[*prev];
    if (!lag.has_score()) continue;
    if (spec.gate_feature) {
      const bool gated = rec.features[*spec.gate_feature] > 0.0 || lag.features[*spec.gate_feature] > 0.0;
      if (!gated) continue;
    }
    Row row;
    row.rec = i;
    row.profile = static_cast<int>(profiles::score_to_profile(lag.credit_score));
    row.bin = age_bin(rec.age);
    row.quarter = rec.quarter;
    rows.push_back(row);
    quarters.insert(rec.quarter);
  }
  if (rows.size() < 2) fail(Errc::empty_input, "access_regression: not enough joinable rows");

  const int base_quarter = *quarters.begin();
  std::vector<int> later_quarters(quarters.begin(), quarters.end());
  later_quarters.erase(later_quarters.begin());

  // Columns: profile dummies (base deep subprime), age-bin dummies (base
  // 18-29), then quarter x profile interactions for every non-base quarter.
  const std::size_t k_profiles = 4;
  const std::size_t k_bins = kNumAgeBins - 1;
  const std::size_t k_qp = later_quarters.size() * 5;
  Matrix full(rows.size(), k_profiles + k_bins + k_qp);
  std::vector<std::string> full_names;
  std::vector<double> y(rows.size());
  for (std::size_t p = 1; p < 5; ++p) full_names.push_back(std::string("profile_") + std::to_string(p));
  for (std::size_t b = 1; b < kNumAgeBins; ++b) full_names.push_back("age_bin_" + std::to_string(b));
  std::map<int, std::size_t> quarter_slot;
  for (std::size_t qi = 0; qi < later_quarters.size(); ++qi) {
    quarter_slot[later_quarters[qi]] = qi;
    for (int p = 0; p < 5; ++p) {
      full_names.push_back("q" + std::to_string(later_quarters[qi]) + "_x_profile_" + std::to_string(p));
    }
  }

  std::map<std::string, std::int32_t> geo_ids;
  std::vector<std::int32_t> fe(rows.size()), cl(rows.size()), cl_q(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& rec = panel.records[rows[r].rec];
    const double raw = rec.features[spec.outcome_feature];
    y[r] = spec.outcome_as_indicator ? (raw > 0.0 ? 1.0 : 0.0) : raw;
    if (rows[r].profile >= 1) full.at(r, static_cast<std::size_t>(rows[r].profile - 1)) = 1.0;
    if (rows[r].bin >= 1) full.at(r, k_profiles + static_cast<std::size_t>(rows[r].bin - 1)) = 1.0;
    if (rows[r].quarter != base_quarter) {
      const std::size_t slot = quarter_slot.at(rows[r].quarter);
      full.at(r, k_profiles + k_bins + slot * 5 + static_cast<std::size_t>(rows[r].profile)) = 1.0;
    }
    auto git = geo_ids.find(rec.zip);
    if (git == geo_ids.end()) git = geo_ids.emplace(rec.zip, static_cast<std::int32_t>(geo_ids.size())).first;
    fe[r] = git->second;
    cl[r] = git->second;
    cl_q[r] = rows[r].quarter;
  }

  // Sparse panels can leave whole (quarter, profile) cells or even profile
  // bands empty; their all-zero dummies would make the design singular, so
  // they are dropped and read as coefficient 0 downstream.
  std::vector<std::size_t> live_cols;
  for (std::size_t j = 0; j < full.cols; ++j) {
    bool any = false;
    for (std::size_t r = 0; r < rows.size() && !any; ++r) any = full.at(r, j) != 0.0;
    if (any) live_cols.push_back(j);
  }
  RegressionData data;
  data.X = Matrix(rows.size(), live_cols.size());
  data.y = std::move(y);
  for (std::size_t jj = 0; jj < live_cols.size(); ++jj) {
    data.names.push_back(full_names[live_cols[jj]]);
    for (std::size_t r = 0; r < rows.size(); ++r) data.X.at(r, jj) = full.at(r, live_cols[jj]);
  }
  data.fixed_effects.push_back(std::move(fe));
  data.clusters.push_back(std::move(cl));
  if (spec.cluster_mode != ClusterMode::one_way) data.clusters.push_back(std::move(cl_q));

  FitOptions options;
  options.cluster_mode = spec.cluster_mode;
  AccessResult out;
  out.regression = fit_fe_ols(data, options);
  std::map<std::string, double> coef_by_name;
  for (std::size_t j = 0; j < out.regression.names.size(); ++j) {
    coef_by_name[out.regression.names[j]] = out.regression.coef[j];
  }
  const auto coef_of = [&](const std::string& name) {
    auto it = coef_by_name.find(name);
    return it == coef_by_name.end() ? 0.0 : it->second;
  };

  // Age shares: configured, or empirical over the estimation sample.
  out.age_shares_used = spec.age_shares;
  double share_sum = 0.0;
  for (double s : out.age_shares_used) share_sum += s;
  if (share_sum <= 0.0) {
    std::array<double, kNumAgeBins> emp{};
    for (const auto& row : rows) emp[static_cast<std::size_t>(row.bin)] += 1.0;
    for (double& s : emp) s /= static_cast<double>(rows.size());
    out.age_shares_used = emp;
  } else if (std::abs(share_sum - 1.0) > 1e-6) {
    fail(Errc::invalid_config, "access_regression: age_shares must sum to 1");
  }

  double age_adjust = 0.0;
  for (std::size_t b = 1; b < kNumAgeBins; ++b) {
    age_adjust += out.age_shares_used[b] * coef_of("age_bin_" + std::to_string(b));
  }
  for (std::size_t p = 0; p < 5; ++p) {
    const double beta_p = p == 0 ? 0.0 : coef_of("profile_" + std::to_string(p));
    out.age_adjusted_levels[p] = out.regression.intercept + beta_p + age_adjust;
  }

  for (int q : later_quarters) {
    for (int p = 0; p < 5; ++p) {
      const std::string name = "q" + std::to_string(q) + "_x_profile_" + std::to_string(p);
      if (!coef_by_name.count(name)) continue;  // empty cell, dropped above
      QuarterProfileEffect eff;
      eff.quarter = q;
      eff.profile = p;
      eff.coef = coef_by_name[name];
      eff.age_adjusted_level = out.age_adjusted_levels[static_cast<std::size_t>(p)] + eff.coef;
      out.time_effects.push_back(eff);
    }
  }
  return out;
}

}  // namespace credkit::equity
