#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "credkit/dataset.hpp"

namespace credkit::attribution {

using PredictFn = std::function<double(std::span<const double>)>;

struct ShapConfig {
  Matrix background;          // reference rows for interventional expectations
  int n_permutations = 16;
  std::uint64_t seed = 0;
  std::size_t exact_dim_limit = 15;
};

// Exact Shapley values by full subset enumeration over `active`. Features
// outside the coalition are replaced by background rows and averaged
// (interventional expectations). With all features active, efficiency holds:
// sum(phi) = f(x) - mean_background(f). Throws DimTooLarge past the limit.
std::vector<double> shapley_exact(const PredictFn& model, std::span<const double> x,
                                  std::span<const std::size_t> active, const ShapConfig& config);

// Permutation Monte Carlo estimate over all features: each permutation draws
// one background row and walks features from background values to x,
// crediting each feature its marginal change. Deterministic given the seed;
// converges to shapley_exact as n_permutations grows.
std::vector<double> shapley_sampled(const PredictFn& model, std::span<const double> x,
                                    const ShapConfig& config);

// Per-feature mean |phi| over a sample and the five normalized group shares.
struct AttributionReport {
  std::vector<double> per_feature_mean_abs;
  std::array<double, 5> group_shares{};
  std::size_t n_samples = 0;
  int n_permutations = 0;
};

// Attribution aggregated the way the scorecard factor table is built: sum of
// |phi| per feature over the sample, folded into the five feature groups and
// normalized to 1. Uses exact enumeration when the feature count is within
// exact_dim_limit, the sampled estimator otherwise. Requires 79-column rows.
AttributionReport group_attribution(const PredictFn& model, const Matrix& sample,
                                    const ShapConfig& config);

}  // namespace credkit::attribution
