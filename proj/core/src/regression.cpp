#include "credkit/regression.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "credkit/errors.hpp"

namespace credkit::equity {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Prepared {
  std::vector<std::size_t> kept;           // original row indices
  MatrixXd x;                              // demeaned design (incl. const col when applicable)
  VectorXd y;                              // demeaned outcome
  VectorXd w;                              // row weights
  VectorXd y_raw;                          // original outcome on kept rows
  std::vector<std::string> names;
  bool explicit_intercept = false;
  std::size_t absorbed_dof = 0;
  std::size_t n_factors = 0;
};

// Iteratively drops rows that are singletons within any fixed-effect factor;
// a drop can create new singletons elsewhere, so loop to a fixed point.
std::vector<std::size_t> drop_singletons(const RegressionData& data, std::size_t& dropped) {
  const std::size_t n = data.y.size();
  std::vector<char> keep(n, 1);
  dropped = 0;
  if (data.fixed_effects.empty()) {
    std::vector<std::size_t> kept(n);
    std::iota(kept.begin(), kept.end(), std::size_t{0});
    return kept;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& factor : data.fixed_effects) {
      std::map<std::int32_t, std::size_t> count;
      for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) count[factor[i]] += 1;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (keep[i] && count[factor[i]] == 1) {
          keep[i] = 0;
          ++dropped;
          changed = true;
        }
      }
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) kept.push_back(i);
  }
  return kept;
}

Prepared prepare(const RegressionData& data, const FitOptions& options) {
  const std::size_t n = data.y.size();
  if (n == 0) fail(Errc::empty_input, "fit_fe_ols: no observations");
  if (data.X.rows != n) fail(Errc::key_mismatch, "fit_fe_ols: X rows != y length");
  for (const auto& factor : data.fixed_effects) {
    if (factor.size() != n) fail(Errc::key_mismatch, "fit_fe_ols: fixed-effect length != y length");
  }
  if (!data.weights.empty() && data.weights.size() != n) {
    fail(Errc::key_mismatch, "fit_fe_ols: weights length != y length");
  }

  Prepared prep;
  std::size_t dropped = 0;
  prep.kept = drop_singletons(data, dropped);
  if (prep.kept.empty()) fail(Errc::empty_after_drops, "fit_fe_ols: all rows dropped as singletons");
  const std::size_t m = prep.kept.size();
  const std::size_t k_x = data.X.cols;
  prep.names = data.names;
  prep.n_factors = data.fixed_effects.size();

  prep.explicit_intercept = options.add_intercept && data.fixed_effects.empty();
  const std::size_t k = k_x + (prep.explicit_intercept ? 1 : 0);
  prep.x.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  prep.y.resize(static_cast<Eigen::Index>(m));
  prep.w.resize(static_cast<Eigen::Index>(m));
  prep.y_raw.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = prep.kept[i];
    for (std::size_t j = 0; j < k_x; ++j) {
      prep.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data.X.at(r, j);
    }
    if (prep.explicit_intercept) prep.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k_x)) = 1.0;
    prep.y(static_cast<Eigen::Index>(i)) = data.y[r];
    prep.y_raw(static_cast<Eigen::Index>(i)) = data.y[r];
    prep.w(static_cast<Eigen::Index>(i)) = data.weights.empty() ? 1.0 : data.weights[r];
  }
  if (prep.explicit_intercept) prep.names.push_back("const");

  if (!data.fixed_effects.empty()) {
    // Remap levels to dense ids over the kept rows and count absorbed dof:
    // the first factor contributes L levels, each further factor L - 1.
    std::vector<std::vector<std::int32_t>> levels(prep.n_factors, std::vector<std::int32_t>(m));
    std::vector<std::size_t> n_levels(prep.n_factors, 0);
    for (std::size_t f = 0; f < prep.n_factors; ++f) {
      std::map<std::int32_t, std::int32_t> remap;
      for (std::size_t i = 0; i < m; ++i) {
        const std::int32_t raw = data.fixed_effects[f][prep.kept[i]];
        auto it = remap.find(raw);
        if (it == remap.end()) it = remap.emplace(raw, static_cast<std::int32_t>(remap.size())).first;
        levels[f][i] = it->second;
      }
      n_levels[f] = remap.size();
      prep.absorbed_dof += f == 0 ? remap.size() : remap.size() - 1;
    }

    // Alternating projections: subtract weighted group means per factor for
    // every column (X and y) until the largest adjustment is below tol.
    std::vector<double> mean_buf;
    std::vector<double> wsum_buf;
    for (int iter = 0; iter < options.demean_max_iter; ++iter) {
      double max_shift = 0.0;
      for (std::size_t f = 0; f < prep.n_factors; ++f) {
        const std::size_t nl = n_levels[f];
        wsum_buf.assign(nl, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
          wsum_buf[static_cast<std::size_t>(levels[f][i])] += prep.w(static_cast<Eigen::Index>(i));
        }
        for (std::size_t col = 0; col <= k; ++col) {  // col k = y
          mean_buf.assign(nl, 0.0);
          for (std::size_t i = 0; i < m; ++i) {
            const double v = col < k ? prep.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col))
                                     : prep.y(static_cast<Eigen::Index>(i));
            mean_buf[static_cast<std::size_t>(levels[f][i])] += prep.w(static_cast<Eigen::Index>(i)) * v;
          }
          for (std::size_t l = 0; l < nl; ++l) mean_buf[l] /= wsum_buf[l];
          for (std::size_t i = 0; i < m; ++i) {
            const double mu = mean_buf[static_cast<std::size_t>(levels[f][i])];
            max_shift = std::max(max_shift, std::abs(mu));
            if (col < k) {
              prep.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) -= mu;
            } else {
              prep.y(static_cast<Eigen::Index>(i)) -= mu;
            }
          }
        }
      }
      if (max_shift < options.demean_tol) break;
    }
  }
  return prep;
}

MatrixXd bread_inverse(const Prepared& prep) {
  const MatrixXd xtwx =
      prep.x.transpose() * prep.w.asDiagonal() * prep.x;
  return xtwx.ldlt().solve(MatrixXd::Identity(xtwx.rows(), xtwx.cols()));
}

std::vector<std::int32_t> cluster_ids(const RegressionData& data, const std::vector<std::size_t>& kept,
                                      std::size_t key, std::size_t& n_clusters) {
  std::map<std::int32_t, std::int32_t> remap;
  std::vector<std::int32_t> out(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const std::int32_t raw = data.clusters[key][kept[i]];
    auto it = remap.find(raw);
    if (it == remap.end()) it = remap.emplace(raw, static_cast<std::int32_t>(remap.size())).first;
    out[i] = it->second;
  }
  n_clusters = remap.size();
  return out;
}

std::vector<std::int32_t> interacted_ids(const RegressionData& data, const std::vector<std::size_t>& kept,
                                         std::size_t& n_clusters) {
  std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> remap;
  std::vector<std::int32_t> out(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const std::pair<std::int32_t, std::int32_t> raw{data.clusters[0][kept[i]], data.clusters[1][kept[i]]};
    auto it = remap.find(raw);
    if (it == remap.end()) it = remap.emplace(raw, static_cast<std::int32_t>(remap.size())).first;
    out[i] = it->second;
  }
  n_clusters = remap.size();
  return out;
}

// One-way CRVE: c * B (sum_g m_g m_g') B with m_g = sum_{i in g} w_i e_i x_i
// and c = G/(G-1) * (N-1)/(N-K).
MatrixXd crve(const Prepared& prep, const VectorXd& resid, const MatrixXd& bread,
              const std::vector<std::int32_t>& ids, std::size_t n_clusters, std::size_t dof_model) {
  const auto k = prep.x.cols();
  const std::size_t m = prep.kept.size();
  MatrixXd scores = MatrixXd::Zero(static_cast<Eigen::Index>(n_clusters), k);
  for (std::size_t i = 0; i < m; ++i) {
    scores.row(ids[i]) += prep.w(static_cast<Eigen::Index>(i)) * resid(static_cast<Eigen::Index>(i)) *
                          prep.x.row(static_cast<Eigen::Index>(i));
  }
  const MatrixXd meat = scores.transpose() * scores;
  const double g = static_cast<double>(n_clusters);
  const double n = static_cast<double>(m);
  const double kk = static_cast<double>(dof_model);
  const double factor = g / (g - 1.0) * (n - 1.0) / (n - kk);
  return factor * bread * meat * bread;
}

}  // namespace

RegressionResult fit_fe_ols(const RegressionData& data, const FitOptions& options) {
  Prepared prep = prepare(data, options);
  const std::size_t m = prep.kept.size();
  const auto k = prep.x.cols();

  const VectorXd sw = prep.w.array().sqrt();
  const MatrixXd xs = sw.asDiagonal() * prep.x;
  const VectorXd ys = sw.asDiagonal() * prep.y;

  Eigen::ColPivHouseholderQR<MatrixXd> qr(xs);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    fail(Errc::collinear_regressors, "fit_fe_ols: design is rank deficient after demeaning (rank " +
                                         std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
  }
  const VectorXd beta = qr.solve(ys);
  const VectorXd resid = prep.y - prep.x * beta;

  RegressionResult res;
  res.kept_rows = prep.kept;
  res.n_obs = m;
  res.n_dropped_singletons = data.y.size() - m;
  res.dof_model = static_cast<std::size_t>(k) + prep.absorbed_dof;
  res.residuals.assign(resid.data(), resid.data() + resid.size());

  // R^2 about the weighted grand mean of the original outcome; residuals are
  // full-model residuals (absorbed effects included).
  const double wsum = prep.w.sum();
  const double ybar = (prep.w.array() * prep.y_raw.array()).sum() / wsum;
  double ssr = 0.0, sst = 0.0;
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    ssr += prep.w(i) * resid(i) * resid(i);
    const double d = prep.y_raw(i) - ybar;
    sst += prep.w(i) * d * d;
  }
  res.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;

  // Coefficients; the explicit constant column is split out.
  const std::size_t k_x = data.X.cols;
  res.names.assign(data.names.begin(), data.names.end());
  res.coef.resize(k_x);
  for (std::size_t j = 0; j < k_x; ++j) res.coef[j] = beta(static_cast<Eigen::Index>(j));
  if (prep.explicit_intercept) {
    res.intercept = beta(static_cast<Eigen::Index>(k_x));
  } else {
    // mean(y) - mean(x)'beta over the kept rows (weighted).
    double acc = ybar;
    for (std::size_t j = 0; j < k_x; ++j) {
      double xbar = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        xbar += prep.w(static_cast<Eigen::Index>(i)) * data.X.at(prep.kept[i], j);
      }
      acc -= xbar / wsum * res.coef[j];
    }
    res.intercept = acc;
  }

  // Standard errors: clustered when keys are present, classical otherwise.
  std::vector<double> all_se;
  if (!data.clusters.empty()) {
    all_se = clustered_se(data, res, options);
    res.n_clusters.clear();
    for (std::size_t key = 0; key < data.clusters.size(); ++key) {
      std::size_t ng = 0;
      cluster_ids(data, prep.kept, key, ng);
      res.n_clusters.push_back(ng);
    }
  } else {
    const MatrixXd bread = bread_inverse(prep);
    const double dof = static_cast<double>(m) - static_cast<double>(res.dof_model);
    const double sigma2 = dof > 0.0 ? ssr / dof : 0.0;
    all_se.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
      all_se[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, sigma2 * bread(j, j)));
    }
  }
  res.se.assign(all_se.begin(), all_se.begin() + static_cast<std::ptrdiff_t>(k_x));
  if (prep.explicit_intercept) {
    res.intercept_se = all_se[k_x];
    res.intercept_se_valid = true;
  }
  return res;
}

std::vector<double> clustered_se(const RegressionData& data, const RegressionResult& result,
                                 const FitOptions& options) {
  if (data.clusters.empty()) fail(Errc::invalid_config, "clustered_se: no cluster keys");
  const bool two_key = data.clusters.size() >= 2;
  if (options.cluster_mode != ClusterMode::one_way && !two_key) {
    fail(Errc::invalid_config, "clustered_se: two cluster keys required for this mode");
  }

  Prepared prep = prepare(data, options);
  if (prep.kept != result.kept_rows) {
    fail(Errc::key_mismatch, "clustered_se: result does not match the data (different kept rows)");
  }
  const VectorXd resid =
      Eigen::Map<const VectorXd>(result.residuals.data(), static_cast<Eigen::Index>(result.residuals.size()));
  const MatrixXd bread = bread_inverse(prep);
  const auto k = prep.x.cols();

  auto one_way = [&](std::size_t key) {
    std::size_t ng = 0;
    const auto ids = cluster_ids(data, prep.kept, key, ng);
    if (ng < 2) {
      fail(Errc::too_few_clusters,
           "clustered_se: cluster key " + std::to_string(key) + " has " + std::to_string(ng) + " cluster(s)");
    }
    return crve(prep, resid, bread, ids, ng, result.dof_model);
  };

  MatrixXd v;
  std::vector<double> se(static_cast<std::size_t>(k));
  switch (options.cluster_mode) {
    case ClusterMode::one_way: {
      v = one_way(0);
      for (Eigen::Index j = 0; j < k; ++j) {
        se[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, v(j, j)));
      }
      return se;
    }
    case ClusterMode::interacted: {
      std::size_t ng = 0;
      const auto ids = interacted_ids(data, prep.kept, ng);
      if (ng < 2) fail(Errc::too_few_clusters, "clustered_se: interacted key has fewer than 2 clusters");
      v = crve(prep, resid, bread, ids, ng, result.dof_model);
      for (Eigen::Index j = 0; j < k; ++j) {
        se[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, v(j, j)));
      }
      return se;
    }
    case ClusterMode::two_way: {
      const MatrixXd v1 = one_way(0);
      const MatrixXd v2 = one_way(1);
      std::size_t ng12 = 0;
      const auto ids12 = interacted_ids(data, prep.kept, ng12);
      if (ng12 < 2) fail(Errc::too_few_clusters, "clustered_se: intersection key has fewer than 2 clusters");
      const MatrixXd v12 = crve(prep, resid, bread, ids12, ng12, result.dof_model);
      for (Eigen::Index j = 0; j < k; ++j) {
        double var = v1(j, j) + v2(j, j) - v12(j, j);
        if (var <= 0.0) var = std::max(v1(j, j), v2(j, j));  // floor at the one-way max
        se[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, var));
      }
      return se;
    }
  }
  fail(Errc::internal, "clustered_se: unreachable");
}

}  // namespace credkit::equity
