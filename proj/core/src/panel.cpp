#include "credkit/panel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "credkit/errors.hpp"

namespace credkit::panel {

FeatureGroup feature_group(std::size_t feature_index) {
  if (feature_index < 21) return FeatureGroup::payment_history;
  if (feature_index < 64) return FeatureGroup::amounts_owed;
  if (feature_index < 70) return FeatureGroup::length_of_history;
  if (feature_index < 75) return FeatureGroup::credit_mix;
  if (feature_index < kNumFeatures) return FeatureGroup::new_credit;
  fail(Errc::out_of_range, "feature index " + std::to_string(feature_index));
}

const char* group_label(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::payment_history: return "Payment History";
    case FeatureGroup::amounts_owed: return "Amounts Owed";
    case FeatureGroup::length_of_history: return "Length of Credit History";
    case FeatureGroup::credit_mix: return "Credit Mix";
    case FeatureGroup::new_credit: return "New Credit";
  }
  return "";
}

const char* race_token(Race r) {
  switch (r) {
    case Race::white: return "white";
    case Race::black: return "black";
    case Race::hispanic: return "hispanic";
    case Race::asian: return "asian";
    case Race::aian: return "aian";
    case Race::nhpi: return "nhpi";
  }
  return "";
}

std::optional<Race> parse_race(std::string_view token) {
  for (int i = 0; i < static_cast<int>(kNumRaces); ++i) {
    const Race r = static_cast<Race>(i);
    if (token == race_token(r)) return r;
  }
  return std::nullopt;
}

void Panel::canonicalize() {
  std::sort(records.begin(), records.end(), [](const ConsumerQuarter& a, const ConsumerQuarter& b) {
    if (a.consumer_id != b.consumer_id) return a.consumer_id < b.consumer_id;
    return a.quarter < b.quarter;
  });
  if (records.empty()) {
    quarter_min = 0;
    quarter_max = -1;
    return;
  }
  quarter_min = records.front().quarter;
  quarter_max = records.front().quarter;
  for (const auto& r : records) {
    quarter_min = std::min(quarter_min, r.quarter);
    quarter_max = std::max(quarter_max, r.quarter);
  }
}

std::pair<std::size_t, std::size_t> Panel::consumer_range(std::string_view consumer_id) const {
  auto lo = std::lower_bound(records.begin(), records.end(), consumer_id,
                             [](const ConsumerQuarter& r, std::string_view id) { return r.consumer_id < id; });
  auto hi = std::upper_bound(records.begin(), records.end(), consumer_id,
                             [](std::string_view id, const ConsumerQuarter& r) { return id < r.consumer_id; });
  return {static_cast<std::size_t>(lo - records.begin()), static_cast<std::size_t>(hi - records.begin())};
}

std::optional<std::size_t> Panel::find(std::string_view consumer_id, std::int32_t quarter) const {
  auto [lo, hi] = consumer_range(consumer_id);
  auto it = std::lower_bound(records.begin() + static_cast<std::ptrdiff_t>(lo),
                             records.begin() + static_cast<std::ptrdiff_t>(hi), quarter,
                             [](const ConsumerQuarter& r, std::int32_t q) { return r.quarter < q; });
  if (it == records.begin() + static_cast<std::ptrdiff_t>(hi) || it->quarter != quarter) return std::nullopt;
  return static_cast<std::size_t>(it - records.begin());
}

std::optional<int> label_default(const Panel& panel, std::string_view consumer_id, std::int32_t t) {
  auto [lo, hi] = panel.consumer_range(consumer_id);
  if (lo == hi) return std::nullopt;
  auto begin = panel.records.begin() + static_cast<std::ptrdiff_t>(lo);
  auto end = panel.records.begin() + static_cast<std::ptrdiff_t>(hi);
  auto it = std::lower_bound(begin, end, t,
                             [](const ConsumerQuarter& r, std::int32_t q) { return r.quarter < q; });
  // All 8 quarters t..t+7 must be present; quarters are unique per consumer.
  int sum = 0;
  for (int k = 0; k < 8; ++k, ++it) {
    if (it == end || it->quarter != t + k) return std::nullopt;
    sum += it->d_state;
  }
  return sum == 0 ? 0 : 1;
}

LabeledRows labeled_rows_at(const Panel& panel, std::int32_t quarter) {
  LabeledRows out;
  const auto& recs = panel.records;
  std::size_t i = 0;
  while (i < recs.size()) {
    // Consumer segment [i, seg_end).
    std::size_t seg_end = i + 1;
    while (seg_end < recs.size() && recs[seg_end].consumer_id == recs[i].consumer_id) ++seg_end;
    auto begin = recs.begin() + static_cast<std::ptrdiff_t>(i);
    auto end = recs.begin() + static_cast<std::ptrdiff_t>(seg_end);
    auto it = std::lower_bound(begin, end, quarter,
                               [](const ConsumerQuarter& r, std::int32_t q) { return r.quarter < q; });
    if (it != end && it->quarter == quarter) {
      // Outcome window is quarter+1 .. quarter+8.
      auto w = it + 1;
      int sum = 0;
      bool complete = true;
      for (int k = 1; k <= 8; ++k, ++w) {
        if (w == end || w->quarter != quarter + k) {
          complete = false;
          break;
        }
        sum += w->d_state;
      }
      if (complete) {
        out.record_index.push_back(static_cast<std::uint32_t>(it - recs.begin()));
        out.label.push_back(sum == 0 ? 0 : 1);
      }
    }
    i = seg_end;
  }
  return out;
}

TransitionMatrix transition_matrix(std::span<const LabelObs> labels) {
  if (labels.empty()) fail(Errc::empty_input, "transition_matrix: no labels");

  std::vector<const LabelObs*> sorted;
  sorted.reserve(labels.size());
  for (const auto& l : labels) sorted.push_back(&l);
  std::sort(sorted.begin(), sorted.end(), [](const LabelObs* a, const LabelObs* b) {
    if (a->consumer_id != b->consumer_id) return a->consumer_id < b->consumer_id;
    return a->quarter < b->quarter;
  });

  std::array<std::array<std::uint64_t, 2>, 2> counts{{{0, 0}, {0, 0}}};
  double y_sum = 0.0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    y_sum += sorted[i]->y;
    if (i + 1 < sorted.size() && sorted[i + 1]->consumer_id == sorted[i]->consumer_id &&
        sorted[i + 1]->quarter == sorted[i]->quarter + 1) {
      counts[sorted[i]->y ? 1 : 0][sorted[i + 1]->y ? 1 : 0] += 1;
      ++pairs;
    }
  }
  if (pairs == 0) fail(Errc::empty_input, "transition_matrix: no consecutive label pairs");

  TransitionMatrix tm;
  tm.default_freq = y_sum / static_cast<double>(labels.size());
  for (int a = 0; a < 2; ++a) {
    const std::uint64_t row = counts[a][0] + counts[a][1];
    if (row == 0) continue;
    tm.row_present[a] = true;
    tm.p[a][0] = static_cast<double>(counts[a][0]) / static_cast<double>(row);
    tm.p[a][1] = static_cast<double>(counts[a][1]) / static_cast<double>(row);
  }
  return tm;
}

ValidationReport validate_panel(const Panel& panel) {
  ValidationReport report;
  auto add = [&](std::size_t row, std::string column, std::string code, std::string message) {
    report.violations.push_back({row, std::move(column), std::move(code), std::move(message)});
  };

  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const auto& r = panel.records[i];
    const std::size_t row = r.source_line > 0 ? r.source_line : i;
    if (i + 1 < panel.records.size()) {
      const auto& next = panel.records[i + 1];
      if (next.consumer_id == r.consumer_id && next.quarter == r.quarter) {
        add(row, "consumer_id", "DuplicateKey",
            "duplicate (consumer_id, quarter) = (" + r.consumer_id + ", " + std::to_string(r.quarter) + ")");
      }
    }
    if (r.d_state > 1) add(row, "d_state", "InvariantViolation", "d_state must be 0 or 1");
    if (r.credit_score >= 0 && (r.credit_score < 300 || r.credit_score > 850)) {
      add(row, "credit_score", "InvariantViolation",
          "credit_score " + std::to_string(r.credit_score) + " outside [300, 850]");
    }
    if (r.has_true_pd() && (r.true_pd < 0.0f || r.true_pd > 1.0f)) {
      add(row, "true_pd", "InvariantViolation", "true_pd outside [0, 1]");
    }
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (!std::isfinite(r.features[f])) {
        add(row, "f" + std::string(f + 1 < 10 ? "00" : (f + 1 < 100 ? "0" : "")) + std::to_string(f + 1),
            "InvariantViolation", "non-finite feature value");
        break;  // one report per record is enough
      }
    }
  }
  return report;
}

}  // namespace credkit::panel
