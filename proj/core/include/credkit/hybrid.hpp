#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "credkit/gbt.hpp"
#include "credkit/metrics.hpp"
#include "credkit/mlp.hpp"
#include "credkit/panel.hpp"

namespace credkit::model {

struct TrainConfig {
  GbtConfig gbt;
  MlpConfig mlp;
  double val_fraction = 0.2;      // random 80/20 split of the training quarter
  double weight_grid_step = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// Two-step ensemble: each component trained on its own, then predictions
// blended with a validation-chosen convex weight.
struct HybridModel {
  GbtModel gbt;
  MlpModel mlp;
  double weight_gbt = 0.5;
  int trained_on_quarter = 0;

  double predict(std::span<const double> x) const;
};

// Grid argmax of validation AUC for the blend w*p_gbt + (1-w)*p_mlp over
// w in {0, step, ..., 1}. Ties prefer the weight closest to 0.5; the residual
// w vs 1-w tie goes to the larger weight. Throws DegenerateLabels when y_val
// has one class.
double select_ensemble_weight(std::span<const double> p_gbt, std::span<const double> p_mlp,
                              std::span<const int> y_val, double grid_step);

// Feature matrix and labels for the labelable records of one quarter.
struct TrainingSet {
  Matrix X;
  std::vector<int> y;
  std::vector<std::uint32_t> record_index;  // into panel.records
};
TrainingSet make_training_set(const panel::Panel& panel, std::int32_t quarter);

struct QuarterRun {
  int quarter = 0;           // evaluation quarter
  int training_quarter = 0;  // quarter - 8
  HybridModel model;
  double validation_auc = 0.0;
  metrics::PredictionSet predictions;
};

struct SkippedQuarter {
  int quarter = 0;
  std::string reason;
};

struct TemporalCvResult {
  std::vector<QuarterRun> runs;
  std::vector<SkippedQuarter> skipped;
};

// Evaluation quarters with enough history on both ends: training records at
// q-8 and labelable test records at q.
std::vector<int> eligible_quarters(const panel::Panel& panel);

// For each evaluation quarter q: split quarter q-8 records 80/20 into
// train/validation (seeded), fit both components on train, pick the ensemble
// weight on validation, and predict every labelable record at q. Quarters
// without sufficient history are reported in `skipped`.
TemporalCvResult temporal_cv(const panel::Panel& panel, std::span<const int> quarters,
                             const TrainConfig& config);

}  // namespace credkit::model
