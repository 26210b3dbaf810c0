#include "credkit/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "credkit/errors.hpp"
#include "credkit/rng.hpp"

namespace credkit::model {

void TrainConfig::validate() const {
  gbt.validate();
  mlp.validate();
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    fail(Errc::invalid_config, "val_fraction must be in (0, 1)");
  }
  if (!(weight_grid_step > 0.0 && weight_grid_step <= 1.0)) {
    fail(Errc::invalid_config, "weight_grid_step must be in (0, 1]");
  }
}

double HybridModel::predict(std::span<const double> x) const {
  return weight_gbt * gbt.predict(x) + (1.0 - weight_gbt) * mlp.predict(x);
}

double select_ensemble_weight(std::span<const double> p_gbt, std::span<const double> p_mlp,
                              std::span<const int> y_val, double grid_step) {
  if (p_gbt.size() != p_mlp.size() || p_gbt.size() != y_val.size()) {
    fail(Errc::key_mismatch, "select_ensemble_weight: length mismatch");
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) fail(Errc::invalid_config, "grid_step must be in (0, 1]");

  std::vector<double> blend(p_gbt.size());
  double best_w = 0.5;
  double best_auc = -1.0;
  const int steps = static_cast<int>(std::round(1.0 / grid_step));
  for (int k = 0; k <= steps; ++k) {
    const double w = std::min(1.0, k * grid_step);
    for (std::size_t i = 0; i < blend.size(); ++i) {
      blend[i] = w * p_gbt[i] + (1.0 - w) * p_mlp[i];
    }
    const double a = metrics::auc(blend, y_val);  // throws DegenerateLabels
    // Tie-breaking: prefer the weight nearest 0.5; between w and 1-w prefer
    // the larger (leaning on the trees).
    const bool better = a > best_auc + 1e-15 ||
                        (std::abs(a - best_auc) <= 1e-15 &&
                         (std::abs(w - 0.5) < std::abs(best_w - 0.5) - 1e-12 ||
                          (std::abs(std::abs(w - 0.5) - std::abs(best_w - 0.5)) <= 1e-12 && w > best_w)));
    if (best_auc < 0.0 || better) {
      best_auc = a;
      best_w = w;
    }
  }
  return best_w;
}

TrainingSet make_training_set(const panel::Panel& panel, std::int32_t quarter) {
  const panel::LabeledRows rows = panel::labeled_rows_at(panel, quarter);
  TrainingSet ts;
  ts.record_index = rows.record_index;
  ts.y = rows.label;
  ts.X = Matrix(rows.record_index.size(), panel::kNumFeatures);
  for (std::size_t i = 0; i < rows.record_index.size(); ++i) {
    const auto& rec = panel.records[rows.record_index[i]];
    for (std::size_t j = 0; j < panel::kNumFeatures; ++j) {
      ts.X.at(i, j) = static_cast<double>(rec.features[j]);
    }
  }
  return ts;
}

std::vector<int> eligible_quarters(const panel::Panel& panel) {
  std::vector<int> out;
  for (std::int32_t q = panel.quarter_min + 8; q + 8 <= panel.quarter_max; ++q) out.push_back(q);
  return out;
}

TemporalCvResult temporal_cv(const panel::Panel& panel, std::span<const int> quarters,
                             const TrainConfig& config) {
  config.validate();
  TemporalCvResult result;

  for (int q : quarters) {
    const int train_q = q - 8;
    TrainingSet train_set = make_training_set(panel, train_q);
    if (train_set.y.empty()) {
      result.skipped.push_back({q, "no labelable training records at quarter " + std::to_string(train_q)});
      continue;
    }
    TrainingSet test_set = make_training_set(panel, q);
    if (test_set.y.empty()) {
      result.skipped.push_back({q, "no labelable test records at quarter " + std::to_string(q)});
      continue;
    }
    const std::size_t n = train_set.y.size();
    std::size_t n_val = static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(n)));
    n_val = std::min(std::max<std::size_t>(n_val, 1), n - 1);
    if (n < 4) {
      result.skipped.push_back({q, "too few training records at quarter " + std::to_string(train_q)});
      continue;
    }

    // Seeded 80/20 split; the stream depends on the quarter so panels can be
    // extended without disturbing earlier runs.
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::uint32_t{0});
    Rng split_rng(config.seed, 0x30, static_cast<std::uint64_t>(q));
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = split_rng.next_below(i);
      std::swap(perm[i - 1], perm[j]);
    }

    const std::size_t n_train = n - n_val;
    Matrix x_train(n_train, panel::kNumFeatures), x_val(n_val, panel::kNumFeatures);
    std::vector<int> y_train(n_train), y_val(n_val);
    for (std::size_t i = 0; i < n_train; ++i) {
      std::copy_n(train_set.X.row(perm[i]).data(), panel::kNumFeatures, x_train.row(i).data());
      y_train[i] = train_set.y[perm[i]];
    }
    for (std::size_t i = 0; i < n_val; ++i) {
      std::copy_n(train_set.X.row(perm[n_train + i]).data(), panel::kNumFeatures, x_val.row(i).data());
      y_val[i] = train_set.y[perm[n_train + i]];
    }

    const bool train_ok = [&] {
      const int first = y_train.empty() ? 0 : y_train[0];
      for (int v : y_train) {
        if (v != first) return true;
      }
      return false;
    }();
    if (!train_ok) {
      result.skipped.push_back({q, "single-class training labels at quarter " + std::to_string(train_q)});
      continue;
    }

    QuarterRun run;
    run.quarter = q;
    run.training_quarter = train_q;

    MlpConfig mlp_cfg = config.mlp;
    mlp_cfg.seed = derive_stream(config.seed, 0x31, static_cast<std::uint64_t>(q));
    run.model.gbt = fit_gbt(x_train, y_train, config.gbt);
    run.model.mlp = fit_mlp(x_train, y_train, mlp_cfg);
    run.model.trained_on_quarter = train_q;

    std::vector<double> p_gbt(n_val), p_mlp;
    for (std::size_t i = 0; i < n_val; ++i) p_gbt[i] = run.model.gbt.predict(x_val.row(i));
    p_mlp = run.model.mlp.predict_batch(x_val);

    bool val_ok = false;
    for (std::size_t i = 1; i < y_val.size(); ++i) val_ok |= (y_val[i] != y_val[0]);
    if (val_ok) {
      run.model.weight_gbt = select_ensemble_weight(p_gbt, p_mlp, y_val, config.weight_grid_step);
      std::vector<double> blend(n_val);
      for (std::size_t i = 0; i < n_val; ++i) {
        blend[i] = run.model.weight_gbt * p_gbt[i] + (1.0 - run.model.weight_gbt) * p_mlp[i];
      }
      run.validation_auc = metrics::auc(blend, y_val);
    } else {
      run.model.weight_gbt = 0.5;  // validation carries no ranking signal
      run.validation_auc = std::numeric_limits<double>::quiet_NaN();
    }

    const std::vector<double> test_mlp = run.model.mlp.predict_batch(test_set.X);
    run.predictions.reserve(test_set.y.size());
    for (std::size_t i = 0; i < test_set.y.size(); ++i) {
      const auto& rec = panel.records[test_set.record_index[i]];
      metrics::PredictionRow row;
      row.consumer_id = rec.consumer_id;
      row.quarter = q;
      row.p_hat = run.model.weight_gbt * run.model.gbt.predict(test_set.X.row(i)) +
                  (1.0 - run.model.weight_gbt) * test_mlp[i];
      row.label = test_set.y[i];
      if (rec.has_score()) row.credit_score = rec.credit_score;
      run.predictions.push_back(std::move(row));
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

}  // namespace credkit::model
