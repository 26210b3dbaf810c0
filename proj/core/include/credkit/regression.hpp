#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credkit/dataset.hpp"

namespace credkit::equity {

// Numeric design for the fixed-effects OLS engine. Fixed effects and cluster
// keys are pre-coded as dense level ids; the front ends translate named
// columns into this form.
struct RegressionData {
  Matrix X;  // regressors, no intercept column
  std::vector<std::string> names;
  std::vector<double> y;
  std::vector<std::vector<std::int32_t>> fixed_effects;  // one level vector per factor
  std::vector<std::vector<std::int32_t>> clusters;       // one or two key vectors
  std::vector<double> weights;                           // optional, empty = unweighted
};

enum class ClusterMode {
  one_way,     // first key only
  two_way,     // CGM inclusion-exclusion over two keys
  interacted,  // single key formed by the pair
};

struct FitOptions {
  double demean_tol = 1e-10;
  int demean_max_iter = 500;
  ClusterMode cluster_mode = ClusterMode::two_way;
  bool add_intercept = true;
};

struct RegressionResult {
  std::vector<std::string> names;
  std::vector<double> coef;
  std::vector<double> se;
  // Grand-mean constant. With absorbed fixed effects it is reconstructed as
  // mean(y) - mean(x)'beta and carries no standard error.
  double intercept = 0.0;
  double intercept_se = 0.0;
  bool intercept_se_valid = false;
  double r_squared = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_dropped_singletons = 0;
  std::vector<std::size_t> n_clusters;  // per cluster key
  std::size_t dof_model = 0;            // estimated parameters incl. absorbed effects
  std::vector<double> residuals;        // aligned with the retained rows
  std::vector<std::size_t> kept_rows;   // indices into the original data
};

// Absorbs fixed effects by iterated within-demeaning, then solves the normal
// equations on the demeaned data. Rows that are singletons in any factor are
// dropped first (iteratively) and counted. Throws CollinearRegressors when
// the demeaned design is rank deficient and EmptyAfterDrops when nothing
// survives.
RegressionResult fit_fe_ols(const RegressionData& data, const FitOptions& options = {});

// Cluster-robust standard errors for a fitted result, per the options'
// cluster mode. One-way CRVE uses the Liang-Zeger sandwich with the
// G/(G-1) * (N-1)/(N-K) small-sample factor; two keys combine by
// inclusion-exclusion with per-coefficient flooring at the one-way maximum
// when the intersection term turns the variance negative. Requires at least
// two clusters per key.
std::vector<double> clustered_se(const RegressionData& data, const RegressionResult& result,
                                 const FitOptions& options);

}  // namespace credkit::equity
