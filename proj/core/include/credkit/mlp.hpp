#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "credkit/dataset.hpp"

namespace credkit::model {

struct MlpConfig {
  int hidden1 = 64;
  int hidden2 = 32;
  double learning_rate = 0.01;
  int epochs = 30;
  int batch_size = 256;
  std::uint64_t seed = 0;
  bool standardize = true;  // z-score inputs on the training set

  void validate() const;
};

// Feed-forward network 79 -> h1 -> h2 -> 1, rectifier hidden activations,
// sigmoid output. Weights are stored row-major as weights[l][out * fan_in + in].
struct MlpModel {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input_mean;   // empty when standardization is off
  std::vector<double> input_scale;

  double predict(std::span<const double> x) const;
  std::vector<double> predict_batch(const Matrix& X) const;
};

// Seeded Glorot-uniform initialization; fit_mlp with epochs == 0 returns
// exactly this.
MlpModel init_mlp(std::size_t n_features, const MlpConfig& config);

// Mean binary cross-entropy of the model on (X, y).
double mlp_loss(const MlpModel& model, const Matrix& X, std::span<const int> y);

// Analytic loss gradients, same shapes as the model parameters. Exposed so
// the finite-difference check can probe exactly what training uses.
struct MlpGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};
MlpGradients mlp_gradients(const MlpModel& model, const Matrix& X, std::span<const int> y);

// Mini-batch gradient descent on cross-entropy; deterministic given the
// config seed. Throws DivergenceDetected if the loss stops being finite.
MlpModel fit_mlp(const Matrix& X, std::span<const int> y, const MlpConfig& config);

}  // namespace credkit::model
