#pragma once

#include <span>
#include <vector>

#include "credkit/dataset.hpp"

namespace credkit::model {

struct GbtConfig {
  int n_trees = 200;
  int max_depth = 3;
  double shrinkage = 0.1;  // nu in (0, 1]
  double leaf_reg = 1.0;   // lambda >= 0
  int min_leaf = 20;

  void validate() const;  // throws InvalidConfig
};

// Flat node layout; feature == -1 marks a leaf. Routing rule:
// x[feature] < threshold goes left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> x) const;
};

// Stagewise additive model on logistic loss. Log-odds prediction is
// base_score + shrinkage * sum of Newton-step leaf values.
struct GbtModel {
  std::vector<RegressionTree> trees;
  double shrinkage = 0.1;
  double base_score = 0.0;  // log-odds
  double leaf_reg = 1.0;
  bool degenerate = false;  // single-class training labels
  std::vector<double> training_loss;  // mean log-loss after each round

  double predict_logodds(std::span<const double> x) const;
  double predict(std::span<const double> x) const;  // probability in (0, 1)
};

GbtModel fit_gbt(const Matrix& X, std::span<const int> y, const GbtConfig& config);

}  // namespace credkit::model
