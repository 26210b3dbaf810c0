#include "credkit/mlp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credkit/errors.hpp"
#include "credkit/rng.hpp"

namespace credkit::model {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> weight_map(const MlpModel& m, std::size_t layer) {
  return {m.weights[layer].data(), m.layer_sizes[layer + 1], m.layer_sizes[layer]};
}

// Standardized input batch for the given rows.
MatrixXd input_batch(const MlpModel& m, const Matrix& X, std::span<const std::uint32_t> rows) {
  const std::size_t d = X.cols;
  MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  const bool scale = !m.input_mean.empty();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = X.row(rows[i]);
    for (std::size_t j = 0; j < d; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          scale ? (row[j] - m.input_mean[j]) / m.input_scale[j] : row[j];
    }
  }
  return a;
}

struct ForwardPass {
  MatrixXd a0, z1, a1, z2, a2;
  VectorXd z3, p;
};

ForwardPass forward(const MlpModel& m, MatrixXd a0) {
  ForwardPass fp;
  fp.a0 = std::move(a0);
  const auto w1 = weight_map(m, 0);
  const auto w2 = weight_map(m, 1);
  const auto w3 = weight_map(m, 2);
  const Eigen::Map<const VectorXd> b1(m.biases[0].data(), m.layer_sizes[1]);
  const Eigen::Map<const VectorXd> b2(m.biases[1].data(), m.layer_sizes[2]);
  const double b3 = m.biases[2][0];

  fp.z1 = (fp.a0 * w1.transpose()).rowwise() + b1.transpose();
  fp.a1 = fp.z1.cwiseMax(0.0);
  fp.z2 = (fp.a1 * w2.transpose()).rowwise() + b2.transpose();
  fp.a2 = fp.z2.cwiseMax(0.0);
  fp.z3 = fp.a2 * w3.transpose().col(0);
  fp.z3.array() += b3;
  fp.p = (1.0 + (-fp.z3.array()).exp()).inverse();
  return fp;
}

double batch_loss(const VectorXd& z3, std::span<const int> y, std::span<const std::uint32_t> rows) {
  // Stable BCE in log-odds form.
  double acc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double z = z3(static_cast<Eigen::Index>(i));
    const double log1pe = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    acc += log1pe - y[rows[i]] * z;
  }
  return acc / static_cast<double>(rows.size());
}

MlpGradients backward(const MlpModel& m, const ForwardPass& fp, std::span<const int> y,
                      std::span<const std::uint32_t> rows) {
  const auto n = static_cast<double>(rows.size());
  const auto w2 = weight_map(m, 1);
  const auto w3 = weight_map(m, 2);

  VectorXd dz3(fp.p.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dz3(static_cast<Eigen::Index>(i)) = (fp.p(static_cast<Eigen::Index>(i)) - y[rows[i]]) / n;
  }

  MlpGradients g;
  g.weights.resize(3);
  g.biases.resize(3);

  const MatrixXd dw3 = dz3.transpose() * fp.a2;  // 1 x h2
  MatrixXd da2 = dz3 * w3;                       // B x h2
  MatrixXd dz2 = (fp.z2.array() > 0.0).select(da2, 0.0);
  const MatrixXd dw2 = dz2.transpose() * fp.a1;  // h2 x h1
  MatrixXd da1 = dz2 * w2;                       // B x h1
  MatrixXd dz1 = (fp.z1.array() > 0.0).select(da1, 0.0);
  const MatrixXd dw1 = dz1.transpose() * fp.a0;  // h1 x d

  auto store = [](const MatrixXd& mat, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(mat.rows() * mat.cols()));
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) {
        out[static_cast<std::size_t>(r * mat.cols() + c)] = mat(r, c);
      }
    }
  };
  store(dw1, g.weights[0]);
  store(dw2, g.weights[1]);
  store(dw3, g.weights[2]);

  const VectorXd s1 = dz1.colwise().sum();
  const VectorXd s2 = dz2.colwise().sum();
  g.biases[0].assign(s1.data(), s1.data() + s1.size());
  g.biases[1].assign(s2.data(), s2.data() + s2.size());
  g.biases[2] = {dz3.sum()};
  return g;
}

}  // namespace

void MlpConfig::validate() const {
  if (hidden1 < 1 || hidden2 < 1) fail(Errc::invalid_config, "mlp: hidden sizes must be >= 1");
  if (!(learning_rate > 0.0)) fail(Errc::invalid_config, "mlp: learning_rate must be positive");
  if (epochs < 0) fail(Errc::invalid_config, "mlp: epochs must be >= 0");
  if (batch_size < 1) fail(Errc::invalid_config, "mlp: batch_size must be >= 1");
}

MlpModel init_mlp(std::size_t n_features, const MlpConfig& config) {
  config.validate();
  MlpModel m;
  m.layer_sizes = {static_cast<int>(n_features), config.hidden1, config.hidden2, 1};
  m.weights.resize(3);
  m.biases.resize(3);
  for (std::size_t l = 0; l < 3; ++l) {
    const int fan_in = m.layer_sizes[l];
    const int fan_out = m.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Rng rng(config.seed, 0x10 + l);
    m.weights[l].resize(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out));
    for (double& w : m.weights[l]) w = (2.0 * rng.next_double() - 1.0) * limit;
    // Small positive bias keeps rectifier units off the kink (and alive) at
    // initialization.
    m.biases[l].assign(static_cast<std::size_t>(fan_out), l < 2 ? 0.01 : 0.0);
  }
  return m;
}

double MlpModel::predict(std::span<const double> x) const {
  Matrix one(1, x.size());
  std::copy(x.begin(), x.end(), one.data.begin());
  const std::uint32_t idx = 0;
  const ForwardPass fp = forward(*this, input_batch(*this, one, {&idx, 1}));
  return fp.p(0);
}

std::vector<double> MlpModel::predict_batch(const Matrix& X) const {
  std::vector<std::uint32_t> rows(X.rows);
  std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  const ForwardPass fp = forward(*this, input_batch(*this, X, rows));
  return {fp.p.data(), fp.p.data() + fp.p.size()};
}

double mlp_loss(const MlpModel& model, const Matrix& X, std::span<const int> y) {
  std::vector<std::uint32_t> rows(X.rows);
  std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  const ForwardPass fp = forward(model, input_batch(model, X, rows));
  return batch_loss(fp.z3, y, rows);
}

MlpGradients mlp_gradients(const MlpModel& model, const Matrix& X, std::span<const int> y) {
  std::vector<std::uint32_t> rows(X.rows);
  std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  const ForwardPass fp = forward(model, input_batch(model, X, rows));
  return backward(model, fp, y, rows);
}

MlpModel fit_mlp(const Matrix& X, std::span<const int> y, const MlpConfig& config) {
  config.validate();
  if (X.rows == 0) fail(Errc::empty_input, "fit_mlp: no rows");
  if (X.rows != y.size()) fail(Errc::key_mismatch, "fit_mlp: |X| != |y|");

  MlpModel m = init_mlp(X.cols, config);
  if (config.standardize) {
    m.input_mean.assign(X.cols, 0.0);
    m.input_scale.assign(X.cols, 1.0);
    for (std::size_t j = 0; j < X.cols; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < X.rows; ++i) mean += X.at(i, j);
      mean /= static_cast<double>(X.rows);
      double var = 0.0;
      for (std::size_t i = 0; i < X.rows; ++i) {
        const double d = X.at(i, j) - mean;
        var += d * d;
      }
      var /= static_cast<double>(X.rows);
      m.input_mean[j] = mean;
      m.input_scale[j] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
  }

  std::vector<std::uint32_t> perm(X.rows);
  std::iota(perm.begin(), perm.end(), std::uint32_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(config.seed, 0x20, static_cast<std::uint64_t>(epoch));
    for (std::size_t i = X.rows; i > 1; --i) {
      const std::size_t j = shuffle_rng.next_below(i);
      std::swap(perm[i - 1], perm[j]);
    }

    bool finite = true;
    for (std::size_t start = 0; start < X.rows; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(X.rows, start + static_cast<std::size_t>(config.batch_size));
      const std::span<const std::uint32_t> rows(perm.data() + start, stop - start);
      const ForwardPass fp = forward(m, input_batch(m, X, rows));
      const MlpGradients g = backward(m, fp, y, rows);
      for (std::size_t l = 0; l < 3; ++l) {
        for (std::size_t k = 0; k < m.weights[l].size(); ++k) {
          m.weights[l][k] -= config.learning_rate * g.weights[l][k];
          if (!std::isfinite(m.weights[l][k])) finite = false;
        }
        for (std::size_t k = 0; k < m.biases[l].size(); ++k) {
          m.biases[l][k] -= config.learning_rate * g.biases[l][k];
          if (!std::isfinite(m.biases[l][k])) finite = false;
        }
      }
    }
    if (!finite || !std::isfinite(mlp_loss(m, X, y))) {
      fail(Errc::divergence_detected, "fit_mlp: loss became non-finite (learning rate too high?)");
    }
  }
  return m;
}

}  // namespace credkit::model
