#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace credkit::metrics {

// One out-of-sample prediction: model probability, realized 8-quarter default
// label, and the credit score when the consumer has one.
struct PredictionRow {
  std::string consumer_id;
  int quarter = 0;
  double p_hat = 0.0;
  int label = 0;
  std::optional<int> credit_score;
};
using PredictionSet = std::vector<PredictionRow>;

void save_predictions(const PredictionSet& rows, const std::string& path);
PredictionSet load_predictions(const std::string& path);

// Mann-Whitney AUC with ties counted 1/2, O(n log n) via mid-ranks.
// Throws DegenerateLabels unless both classes are present.
double auc(std::span<const double> score, std::span<const int> label);

// Gini = 2*AUC - 1, by identity.
double gini(std::span<const double> score, std::span<const int> label);

// Pearson correlation of mid-ranks (average ranks on ties).
double spearman(std::span<const double> a, std::span<const double> b);

// Kendall tau-b (tie corrected), merge-sort inversion counting.
double kendall(std::span<const double> a, std::span<const double> b);

enum class Direction { ascending, descending };

// Equal-frequency percentile bins 1..100 over the sorted order of `values`;
// tied values all land in the bin of their mid-rank. With ascending direction
// larger values get larger bins.
std::vector<int> percentile_rank(std::span<const double> values,
                                 Direction direction = Direction::ascending);

// Continuous percentile in (0, 100]: mid-rank * 100 / n.
std::vector<double> percentile(std::span<const double> values,
                               Direction direction = Direction::ascending);

struct CalibrationRow {
  std::string group;
  std::size_t n = 0;
  double realized = 0.0;
  double mean_p_hat = 0.0;
};

// Realized default frequency and mean predicted probability per group.
std::vector<CalibrationRow> calibration_table(
    const PredictionSet& predictions,
    const std::function<std::string(const PredictionRow&)>& grouping);

}  // namespace credkit::metrics
