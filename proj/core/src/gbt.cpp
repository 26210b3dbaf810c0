#include "credkit/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credkit/errors.hpp"

namespace credkit::model {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamped_logit(double p) {
  const double c = std::clamp(p, 1e-6, 1.0 - 1e-6);
  return std::log(c / (1.0 - c));
}

double mean_logloss(std::span<const double> f, std::span<const int> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    // Stable log(1 + e^f) - y*f.
    const double z = f[i];
    const double log1pe = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    acc += log1pe - y[i] * z;
  }
  return acc / static_cast<double>(f.size());
}

struct BuildNode {
  double sum_g = 0.0;
  double sum_h = 0.0;
  std::size_t count = 0;
  bool open = false;  // still splittable at the current level
  // Best split so far. Features are scanned ascending and thresholds ascend
  // within a feature, so strict improvement keeps the lowest
  // (feature, threshold) on ties.
  double best_gain = 0.0;
  int best_feature = -1;
  double best_threshold = 0.0;
  // Left-accumulator scratch, reset per feature scan.
  double run_g = 0.0;
  double run_h = 0.0;
  std::size_t run_count = 0;
  double prev_value = 0.0;
  bool has_prev = false;
};

}  // namespace

void GbtConfig::validate() const {
  if (n_trees < 1) fail(Errc::invalid_config, "gbt: n_trees must be >= 1");
  if (max_depth < 1) fail(Errc::invalid_config, "gbt: max_depth must be >= 1");
  if (!(shrinkage > 0.0 && shrinkage <= 1.0)) fail(Errc::invalid_config, "gbt: shrinkage must be in (0, 1]");
  if (leaf_reg < 0.0) fail(Errc::invalid_config, "gbt: leaf_reg must be >= 0");
  if (min_leaf < 1) fail(Errc::invalid_config, "gbt: min_leaf must be >= 1");
}

double RegressionTree::predict(std::span<const double> x) const {
  int k = 0;
  while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(k)];
    k = x[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(k)].leaf_value;
}

double GbtModel::predict_logodds(std::span<const double> x) const {
  double f = base_score;
  for (const auto& tree : trees) f += shrinkage * tree.predict(x);
  return f;
}

double GbtModel::predict(std::span<const double> x) const { return sigmoid(predict_logodds(x)); }

GbtModel fit_gbt(const Matrix& X, std::span<const int> y, const GbtConfig& config) {
  config.validate();
  const std::size_t n = X.rows;
  const std::size_t d = X.cols;
  if (n == 0) fail(Errc::empty_input, "fit_gbt: no rows");
  if (n != y.size()) fail(Errc::key_mismatch, "fit_gbt: |X| != |y|");

  GbtModel mdl;
  mdl.shrinkage = config.shrinkage;
  mdl.leaf_reg = config.leaf_reg;

  double y_mean = 0.0;
  for (int v : y) y_mean += v;
  y_mean /= static_cast<double>(n);
  mdl.base_score = clamped_logit(y_mean);

  if (y_mean == 0.0 || y_mean == 1.0 || n < 2) {
    // No gradient signal: constant-probability model, flagged.
    mdl.degenerate = true;
    return mdl;
  }

  // Feature pre-sort, once per fit; ties keep row order for determinism.
  std::vector<std::vector<std::uint32_t>> order(d, std::vector<std::uint32_t>(n));
  for (std::size_t f = 0; f < d; ++f) {
    auto& ord = order[f];
    std::iota(ord.begin(), ord.end(), std::uint32_t{0});
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return X.at(a, f) < X.at(b, f); });
  }

  std::vector<double> score(n, mdl.base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<std::int32_t> node_of(n);

  mdl.trees.reserve(static_cast<std::size_t>(config.n_trees));
  mdl.training_loss.reserve(static_cast<std::size_t>(config.n_trees));

  for (int m = 0; m < config.n_trees; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(score[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }

    RegressionTree tree;
    tree.nodes.push_back(TreeNode{});
    std::vector<BuildNode> meta(1);
    meta[0].open = true;
    meta[0].count = n;
    for (std::size_t i = 0; i < n; ++i) {
      meta[0].sum_g += grad[i];
      meta[0].sum_h += hess[i];
    }
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<std::int32_t> level = {0};

    for (int depth = 0; depth < config.max_depth && !level.empty(); ++depth) {
      for (std::int32_t k : level) {
        meta[static_cast<std::size_t>(k)].best_gain = 1e-12;  // minimum useful gain
        meta[static_cast<std::size_t>(k)].best_feature = -1;
      }

      for (std::size_t f = 0; f < d; ++f) {
        for (std::int32_t k : level) {
          BuildNode& bn = meta[static_cast<std::size_t>(k)];
          bn.run_g = 0.0;
          bn.run_h = 0.0;
          bn.run_count = 0;
          bn.has_prev = false;
        }
        for (std::uint32_t r : order[f]) {
          const std::int32_t k = node_of[r];
          BuildNode& bn = meta[static_cast<std::size_t>(k)];
          if (!bn.open) continue;
          const double v = X.at(r, f);
          if (bn.has_prev && v > bn.prev_value &&
              bn.run_count >= static_cast<std::size_t>(config.min_leaf) &&
              bn.count - bn.run_count >= static_cast<std::size_t>(config.min_leaf)) {
            const double gl = bn.run_g, hl = bn.run_h;
            const double gr = bn.sum_g - gl, hr = bn.sum_h - hl;
            const double gain = 0.5 * (gl * gl / (hl + config.leaf_reg) +
                                       gr * gr / (hr + config.leaf_reg) -
                                       bn.sum_g * bn.sum_g / (bn.sum_h + config.leaf_reg));
            if (gain > bn.best_gain) {
              bn.best_gain = gain;
              bn.best_feature = static_cast<int>(f);
              bn.best_threshold = 0.5 * (bn.prev_value + v);
            }
          }
          bn.run_g += grad[r];
          bn.run_h += hess[r];
          bn.run_count += 1;
          bn.prev_value = v;
          bn.has_prev = true;
        }
      }

      std::vector<std::int32_t> next_level;
      for (std::int32_t k : level) {
        BuildNode& bn = meta[static_cast<std::size_t>(k)];
        if (bn.best_feature < 0) {
          bn.open = false;  // stays a leaf
          continue;
        }
        const std::int32_t left = static_cast<std::int32_t>(tree.nodes.size());
        const std::int32_t right = left + 1;
        tree.nodes[static_cast<std::size_t>(k)].feature = bn.best_feature;
        tree.nodes[static_cast<std::size_t>(k)].threshold = bn.best_threshold;
        tree.nodes[static_cast<std::size_t>(k)].left = left;
        tree.nodes[static_cast<std::size_t>(k)].right = right;
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        meta.resize(tree.nodes.size());
        meta[static_cast<std::size_t>(left)].open = true;
        meta[static_cast<std::size_t>(right)].open = true;
        bn.open = false;
        next_level.push_back(left);
        next_level.push_back(right);
      }

      if (!next_level.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
          const std::int32_t k = node_of[i];
          const TreeNode& nd = tree.nodes[static_cast<std::size_t>(k)];
          if (nd.feature < 0) continue;
          const std::int32_t child =
              X.at(i, static_cast<std::size_t>(nd.feature)) < nd.threshold ? nd.left : nd.right;
          node_of[i] = child;
          meta[static_cast<std::size_t>(child)].sum_g += grad[i];
          meta[static_cast<std::size_t>(child)].sum_h += hess[i];
          meta[static_cast<std::size_t>(child)].count += 1;
        }
      }
      level = std::move(next_level);
    }

    // Newton step per leaf.
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      if (tree.nodes[k].feature >= 0) continue;
      const double denom = meta[k].sum_h + config.leaf_reg;
      tree.nodes[k].leaf_value = denom > 0.0 ? -meta[k].sum_g / denom : 0.0;
    }

    for (std::size_t i = 0; i < n; ++i) {
      score[i] += config.shrinkage * tree.nodes[static_cast<std::size_t>(node_of[i])].leaf_value;
    }
    mdl.trees.push_back(std::move(tree));
    mdl.training_loss.push_back(mean_logloss(score, y));
  }

  return mdl;
}

}  // namespace credkit::model
