#include "credkit/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "credkit/errors.hpp"
#include "credkit/panel.hpp"
#include "credkit/rng.hpp"

namespace credkit::attribution {

namespace {

void check_config(const ShapConfig& config, std::size_t n_features) {
  if (config.background.rows == 0) fail(Errc::invalid_config, "shap: background sample is empty");
  if (config.background.cols != n_features) {
    fail(Errc::invalid_config, "shap: background width != feature count");
  }
  if (config.n_permutations < 1) fail(Errc::invalid_config, "shap: n_permutations must be >= 1");
}

}  // namespace

std::vector<double> shapley_exact(const PredictFn& model, std::span<const double> x,
                                  std::span<const std::size_t> active, const ShapConfig& config) {
  const std::size_t d = x.size();
  check_config(config, d);
  const std::size_t k = active.size();
  if (k > config.exact_dim_limit) {
    fail(Errc::dim_too_large, "shapley_exact: " + std::to_string(k) + " active features exceeds limit " +
                                  std::to_string(config.exact_dim_limit));
  }
  for (std::size_t j : active) {
    if (j >= d) fail(Errc::out_of_range, "shapley_exact: active feature index out of range");
  }

  // v[mask]: coalition members take x, everything else is averaged over the
  // background rows.
  const std::size_t n_masks = std::size_t{1} << k;
  const std::size_t n_bg = config.background.rows;
  std::vector<double> v(n_masks, 0.0);
  std::vector<double> composite(d);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    double acc = 0.0;
    for (std::size_t b = 0; b < n_bg; ++b) {
      const auto bg = config.background.row(b);
      std::copy(bg.begin(), bg.end(), composite.begin());
      for (std::size_t j = 0; j < k; ++j) {
        if (mask & (std::size_t{1} << j)) composite[active[j]] = x[active[j]];
      }
      acc += model(composite);
    }
    v[mask] = acc / static_cast<double>(n_bg);
  }

  // Shapley kernel weights |S|!(k-|S|-1)!/k! by coalition size.
  std::vector<double> weight(k, 0.0);
  if (k > 0) {
    std::vector<double> log_fact(k + 1, 0.0);
    for (std::size_t i = 1; i <= k; ++i) log_fact[i] = log_fact[i - 1] + std::log(static_cast<double>(i));
    for (std::size_t s = 0; s < k; ++s) {
      weight[s] = std::exp(log_fact[s] + log_fact[k - 1 - s] - log_fact[k]);
    }
  }

  std::vector<double> phi(d, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    double acc = 0.0;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      acc += weight[s] * (v[mask | bit] - v[mask]);
    }
    phi[active[j]] = acc;
  }
  return phi;
}

std::vector<double> shapley_sampled(const PredictFn& model, std::span<const double> x,
                                    const ShapConfig& config) {
  const std::size_t d = x.size();
  check_config(config, d);

  std::vector<double> phi(d, 0.0);
  std::vector<double> composite(d);
  std::vector<std::size_t> perm(d);
  Rng rng(config.seed, 0x5a);
  for (int p = 0; p < config.n_permutations; ++p) {
    const std::size_t b = rng.next_below(config.background.rows);
    const auto bg = config.background.row(b);
    std::copy(bg.begin(), bg.end(), composite.begin());

    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = d; i > 1; --i) {
      const std::size_t j = rng.next_below(i);
      std::swap(perm[i - 1], perm[j]);
    }

    double prev = model(composite);
    for (std::size_t j : perm) {
      composite[j] = x[j];
      const double cur = model(composite);
      phi[j] += cur - prev;
      prev = cur;
    }
  }
  for (double& p : phi) p /= static_cast<double>(config.n_permutations);
  return phi;
}

AttributionReport group_attribution(const PredictFn& model, const Matrix& sample,
                                    const ShapConfig& config) {
  if (sample.rows == 0) fail(Errc::empty_input, "group_attribution: empty sample");
  if (sample.cols != panel::kNumFeatures) {
    fail(Errc::invalid_config, "group_attribution: expects the 79-feature layout");
  }
  check_config(config, sample.cols);

  const bool exact = sample.cols <= config.exact_dim_limit;
  std::vector<std::size_t> all(sample.cols);
  std::iota(all.begin(), all.end(), std::size_t{0});

  AttributionReport report;
  report.per_feature_mean_abs.assign(sample.cols, 0.0);
  report.n_samples = sample.rows;
  report.n_permutations = exact ? 0 : config.n_permutations;

  for (std::size_t i = 0; i < sample.rows; ++i) {
    ShapConfig per_obs = config;
    // Decorrelate permutation streams across observations while keeping the
    // whole report a pure function of the config seed.
    per_obs.seed = derive_stream(config.seed, 0x5b, i);
    const std::vector<double> phi =
        exact ? shapley_exact(model, sample.row(i), all, per_obs)
              : shapley_sampled(model, sample.row(i), per_obs);
    for (std::size_t j = 0; j < sample.cols; ++j) {
      report.per_feature_mean_abs[j] += std::abs(phi[j]);
    }
  }
  for (double& v : report.per_feature_mean_abs) v /= static_cast<double>(sample.rows);

  std::array<double, 5> group_total{};
  for (std::size_t j = 0; j < sample.cols; ++j) {
    group_total[static_cast<std::size_t>(panel::feature_group(j))] += report.per_feature_mean_abs[j];
  }
  const double total = std::accumulate(group_total.begin(), group_total.end(), 0.0);
  if (total > 0.0) {
    for (std::size_t g = 0; g < 5; ++g) report.group_shares[g] = group_total[g] / total;
  }
  return report;
}

}  // namespace credkit::attribution
