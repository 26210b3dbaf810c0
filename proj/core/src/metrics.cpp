#include "credkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "credkit/csv.hpp"
#include "credkit/errors.hpp"

namespace credkit::metrics {

namespace {

// Mid-ranks (1-based, average rank over ties).
std::vector<double> mid_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // average of ranks i+1 .. j+1
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

// Half-integer mid "position" (0-based): (first + last) / 2 of the tie group.
std::vector<double> mid_positions(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> pos(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double p = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) pos[order[k]] = p;
    i = j + 1;
  }
  return pos;
}

}  // namespace

double auc(std::span<const double> score, std::span<const int> label) {
  if (score.size() != label.size()) fail(Errc::key_mismatch, "auc: length mismatch");
  if (score.empty()) fail(Errc::empty_input, "auc: no observations");
  std::size_t n_pos = 0;
  for (int y : label) n_pos += (y != 0);
  const std::size_t n_neg = label.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) fail(Errc::degenerate_labels, "auc: single-class labels");

  const std::vector<double> rank = mid_ranks(score);
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] != 0) rank_sum_pos += rank[i];
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

double gini(std::span<const double> score, std::span<const int> label) {
  return 2.0 * auc(score, label) - 1.0;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(Errc::key_mismatch, "spearman: length mismatch");
  if (a.size() < 2) fail(Errc::empty_input, "spearman: need at least 2 observations");
  const std::vector<double> ra = mid_ranks(a);
  const std::vector<double> rb = mid_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - ma;
    const double db = rb[i] - mb;
    sxy += da * db;
    sxx += da * da;
    syy += db * db;
  }
  if (sxx == 0.0 || syy == 0.0) fail(Errc::degenerate_labels, "spearman: constant input");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Counts exchanges a merge sort performs to order `seq` ascending.
std::uint64_t merge_count(std::vector<double>& seq, std::vector<double>& scratch, std::size_t lo,
                          std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(seq, scratch, lo, mid) + merge_count(seq, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (seq[j] < seq[i]) {
      swaps += mid - i;
      scratch[k++] = seq[j++];
    } else {
      scratch[k++] = seq[i++];
    }
  }
  while (i < mid) scratch[k++] = seq[i++];
  while (j < hi) scratch[k++] = seq[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            seq.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

double tie_pairs(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  double t = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
    const double g = static_cast<double>(j - i + 1);
    t += g * (g - 1.0) / 2.0;
    i = j + 1;
  }
  return t;
}

}  // namespace

double kendall(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(Errc::key_mismatch, "kendall: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) fail(Errc::empty_input, "kendall: need at least 2 observations");

  // Knight's algorithm: sort by (a, b), count b-inversions by merge sort,
  // correct for ties in a, b, and joint ties.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (a[i] != a[j]) return a[i] < a[j];
    return b[i] < b[j];
  });

  const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
  const double n1 = tie_pairs(a);
  const double n2 = tie_pairs(b);

  double n3 = 0.0;  // pairs tied in both
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && a[order[j + 1]] == a[order[i]] && b[order[j + 1]] == b[order[i]]) ++j;
      const double g = static_cast<double>(j - i + 1);
      n3 += g * (g - 1.0) / 2.0;
      i = j + 1;
    }
  }

  std::vector<double> seq(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = b[order[i]];
  std::vector<double> scratch(n);
  const double swaps = static_cast<double>(merge_count(seq, scratch, 0, n));

  const double concordant_minus_discordant = n0 - n1 - n2 + n3 - 2.0 * swaps;
  const double denom = std::sqrt((n0 - n1) * (n0 - n2));
  if (denom == 0.0) fail(Errc::degenerate_labels, "kendall: constant input");
  return concordant_minus_discordant / denom;
}

std::vector<int> percentile_rank(std::span<const double> values, Direction direction) {
  if (values.empty()) fail(Errc::empty_input, "percentile_rank: no values");
  std::vector<double> v(values.begin(), values.end());
  if (direction == Direction::descending) {
    for (double& x : v) x = -x;
  }
  const std::vector<double> pos = mid_positions(v);
  const double n = static_cast<double>(v.size());
  std::vector<int> bins(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int b = static_cast<int>(std::floor(pos[i] * 100.0 / n)) + 1;
    bins[i] = std::clamp(b, 1, 100);
  }
  return bins;
}

std::vector<double> percentile(std::span<const double> values, Direction direction) {
  if (values.empty()) fail(Errc::empty_input, "percentile: no values");
  std::vector<double> v(values.begin(), values.end());
  if (direction == Direction::descending) {
    for (double& x : v) x = -x;
  }
  const std::vector<double> rank = mid_ranks(v);  // 1-based mid-ranks
  const double n = static_cast<double>(v.size());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = rank[i] * 100.0 / n;
  return out;
}

std::vector<CalibrationRow> calibration_table(
    const PredictionSet& predictions,
    const std::function<std::string(const PredictionRow&)>& grouping) {
  std::map<std::string, CalibrationRow> acc;
  for (const auto& row : predictions) {
    auto& cell = acc[grouping(row)];
    cell.n += 1;
    cell.realized += row.label;
    cell.mean_p_hat += row.p_hat;
  }
  std::vector<CalibrationRow> out;
  out.reserve(acc.size());
  for (auto& [group, cell] : acc) {
    cell.group = group;
    cell.realized /= static_cast<double>(cell.n);
    cell.mean_p_hat /= static_cast<double>(cell.n);
    out.push_back(cell);
  }
  return out;
}

void save_predictions(const PredictionSet& rows, const std::string& path) {
  csv::Writer w(path);
  w.write_line("consumer_id,quarter,p_hat,label,credit_score");
  std::vector<std::string> fields(5);
  for (const auto& r : rows) {
    fields[0] = r.consumer_id;
    fields[1] = std::to_string(r.quarter);
    fields[2] = csv::format_double(r.p_hat);
    fields[3] = std::to_string(r.label);
    fields[4] = r.credit_score ? std::to_string(*r.credit_score) : std::string();
    w.write_row(fields);
  }
  w.close();
}

PredictionSet load_predictions(const std::string& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("consumer_id");
  const std::size_t c_q = reader.column("quarter");
  const std::size_t c_p = reader.column("p_hat");
  const std::size_t c_y = reader.column("label");
  const std::size_t c_s = reader.column("credit_score");
  PredictionSet out;
  out.reserve(reader.rows.size());
  for (std::size_t i = 0; i < reader.rows.size(); ++i) {
    const auto& row = reader.rows[i];
    const std::size_t line = reader.row_lines[i];
    if (row.size() != reader.header.size()) {
      fail(Errc::parse_error, "line " + std::to_string(line) + ": wrong field count");
    }
    PredictionRow r;
    r.consumer_id = row[c_id];
    r.quarter = static_cast<int>(csv::parse_int(row[c_q], line, "quarter"));
    r.p_hat = csv::parse_double(row[c_p], line, "p_hat");
    r.label = static_cast<int>(csv::parse_int(row[c_y], line, "label"));
    if (!row[c_s].empty()) r.credit_score = static_cast<int>(csv::parse_int(row[c_s], line, "credit_score"));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace credkit::metrics
