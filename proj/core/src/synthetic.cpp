#include "credkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "credkit/errors.hpp"
#include "credkit/rng.hpp"

namespace credkit::panel {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Stationary probability that the 8-quarter-forward label is 1, for a
// two-state chain with entry rate a and exit rate b: the window misses every
// delinquency only if the first quarter is clean (stationary pi0) and the six
// remaining transitions all stay clean.
double stationary_label_prob(double a, double b) {
  const double pi0 = b / (a + b);
  return 1.0 - pi0 * std::pow(1.0 - a, 7.0);
}

struct ConsumerDraw {
  int age = 0;
  double log_income = 0.0;
  double income = 0.0;
  int zip_index = 0;
  Race race = Race::white;
  bool scored = true;
  double history_years = 0.0;
  int product_count = 1;
  double inquiries12 = 0.0;
  bool has_mortgage = false;
  double mortgage_mult = 0.0;
  double s_ph = 0.0, s_ao = 0.0, s_lch = 0.0, s_cm = 0.0, s_nc = 0.0;
  double rho = 0.0;        // latent risk index (standardized later)
  double entry_rate = 0.0; // quarterly 0 -> 1 probability
};

// Piecewise-linear map from a percentile of the score latent to the industry
// 300-850 scale, anchored at the published band boundaries so score ranges
// carry realistic population shares.
int percentile_to_score(double pct) {
  static constexpr double px[6] = {0.0, 6.0, 27.10, 41.10, 77.40, 100.0};
  static constexpr double sx[6] = {300.0, 499.5, 600.5, 660.5, 780.5, 850.0};
  double s = sx[5];
  for (int k = 0; k < 5; ++k) {
    if (pct <= px[k + 1]) {
      const double t = (pct - px[k]) / (px[k + 1] - px[k]);
      s = sx[k] + t * (sx[k + 1] - sx[k]);
      break;
    }
  }
  return std::clamp(static_cast<int>(std::lround(s)), 300, 850);
}

}  // namespace

void GenConfig::validate() const {
  if (n_consumers < 1) fail(Errc::invalid_config, "n_consumers must be >= 1");
  if (n_quarters < 9) {
    fail(Errc::invalid_config, "n_quarters must be >= 9 (no labelable quarter exists otherwise)");
  }
  if (!(target_default_freq > 0.0 && target_default_freq < 1.0)) {
    fail(Errc::invalid_config, "target_default_freq must be in (0, 1)");
  }
  if (!(freq_tolerance > 0.0)) fail(Errc::invalid_config, "freq_tolerance must be positive");
  if (!(exit_rate > 0.0 && exit_rate < 1.0)) fail(Errc::invalid_config, "exit_rate must be in (0, 1)");
  if (!(entry_rate_min > 0.0 && entry_rate_min < entry_rate_max && entry_rate_max < 1.0)) {
    fail(Errc::invalid_config, "entry rates must satisfy 0 < min < max < 1");
  }
  if (!(risk_slope > 0.0)) fail(Errc::invalid_config, "risk_slope must be positive");
  if (score_noise_sd < 0.0) fail(Errc::invalid_config, "score_noise_sd must be >= 0");
  if (unscored_fraction < 0.0 || unscored_fraction >= 1.0) {
    fail(Errc::invalid_config, "unscored_fraction must be in [0, 1)");
  }
  if (n_zips < 1) fail(Errc::invalid_config, "n_zips must be >= 1");
}

Panel generate_synthetic(const GenConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t n = config.n_consumers;
  const int nq = config.n_quarters;
  const double b = config.exit_rate;

  Rng demo_rng(seed, 0x01);
  std::vector<ConsumerDraw> consumers(n);

  // Zip-level minority shares: a squared gradient leaves most zips with a
  // small share and a handful majority-minority.
  std::vector<double> zip_minority(config.n_zips);
  for (int z = 0; z < config.n_zips; ++z) {
    const double t = config.n_zips > 1 ? static_cast<double>(z) / (config.n_zips - 1) : 0.0;
    zip_minority[z] = std::clamp(0.03 + 0.90 * t * t, 0.0, 0.95);
  }

  for (std::size_t i = 0; i < n; ++i) {
    ConsumerDraw& c = consumers[i];
    c.age = 18 + static_cast<int>(demo_rng.next_below(72));
    c.zip_index = static_cast<int>(demo_rng.next_below(static_cast<std::uint64_t>(config.n_zips)));

    const double m = zip_minority[c.zip_index];
    const double u_race = demo_rng.next_double();
    if (u_race < 0.55 * m) {
      c.race = Race::black;
    } else if (u_race < m) {
      c.race = Race::hispanic;
    } else {
      const double v = (u_race - m) / (1.0 - m);
      c.race = v < 0.82 ? Race::white : (v < 0.92 ? Race::asian : (v < 0.96 ? Race::aian : Race::nhpi));
    }

    const bool young = c.age < 30;
    const bool minority = c.race == Race::black || c.race == Race::hispanic;
    const double n_inc = demo_rng.next_normal();
    c.log_income = 10.4 + 0.65 * n_inc - 0.30 * (young ? 1.0 : 0.0) - 0.25 * (minority ? 1.0 : 0.0);
    c.income = std::exp(c.log_income);
    const double inc_std = (c.log_income - 10.4) / 0.65;

    c.history_years = std::clamp((c.age - 18) * (0.55 + 0.35 * demo_rng.next_double()), 0.3, 45.0);

    const double pc_float =
        1.4 + 0.9 * inc_std + 0.6 * (c.age >= 30 ? 1.0 : 0.0) + 1.1 * demo_rng.next_double();
    c.product_count = std::clamp(static_cast<int>(std::lround(pc_float)), 1, 6);

    const double inq_mean =
        std::exp(0.15 + 0.55 * (young ? 1.0 : 0.0) - 0.35 * inc_std + 0.30 * demo_rng.next_normal());
    c.inquiries12 = std::min(std::floor(inq_mean + demo_rng.next_double()), 8.0);

    c.has_mortgage = demo_rng.next_bernoulli(sigmoid(-0.9 + 0.9 * inc_std + 0.045 * (c.age - 35)));
    c.mortgage_mult = 1.8 + 1.3 * demo_rng.next_double();

    // Group risk signals; a shared core ties payment history and balances
    // together the way real credit files are correlated.
    const double z = demo_rng.next_normal();
    c.s_ph = 0.80 * z + 0.60 * demo_rng.next_normal() - 0.25 * inc_std;
    c.s_ao = 0.55 * z + 0.75 * demo_rng.next_normal() - 0.30 * inc_std;
    c.s_lch = (15.0 - c.history_years) / 8.0;
    c.s_cm = (3.0 - c.product_count) / 1.3;
    c.s_nc = (c.inquiries12 - 1.2) / 1.1;

    c.rho = 0.33 * c.s_ph + 0.49 * c.s_ao + 0.08 * c.s_lch + 0.05 * c.s_cm + 0.05 * c.s_nc;
    c.scored = !demo_rng.next_bernoulli(config.unscored_fraction);
  }

  // Standardize the risk index over the generated population.
  double mean_rho = 0.0;
  for (const auto& c : consumers) mean_rho += c.rho;
  mean_rho /= static_cast<double>(n);
  double var_rho = 0.0;
  for (const auto& c : consumers) var_rho += (c.rho - mean_rho) * (c.rho - mean_rho);
  var_rho = n > 1 ? var_rho / static_cast<double>(n - 1) : 1.0;
  const double sd_rho = var_rho > 0.0 ? std::sqrt(var_rho) : 1.0;
  for (auto& c : consumers) c.rho = (c.rho - mean_rho) / sd_rho;

  // Solve the entry-rate intercept so the mean stationary label probability
  // hits the target. Monotone in the intercept, so bisection converges.
  const auto mean_label_prob = [&](double intercept) {
    double acc = 0.0;
    for (const auto& c : consumers) {
      const double a = config.entry_rate_min +
                       (config.entry_rate_max - config.entry_rate_min) *
                           sigmoid(config.risk_slope * c.rho + intercept);
      acc += stationary_label_prob(a, b);
    }
    return acc / static_cast<double>(n);
  };
  double lo = -16.0, hi = 16.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_label_prob(mid) < config.target_default_freq) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double intercept = 0.5 * (lo + hi);
  for (auto& c : consumers) {
    c.entry_rate = config.entry_rate_min + (config.entry_rate_max - config.entry_rate_min) *
                                               sigmoid(config.risk_slope * c.rho + intercept);
  }

  Panel panel;
  panel.records.resize(n * static_cast<std::size_t>(nq));

  // Scratch for the per-quarter score assignment.
  std::vector<double> score_latent(n * static_cast<std::size_t>(nq), 0.0);

  char id_buf[24];
  char zip_buf[16];
  std::vector<std::uint8_t> d_hist(static_cast<std::size_t>(nq));
  for (std::size_t i = 0; i < n; ++i) {
    const ConsumerDraw& c = consumers[i];
    Rng chain_rng(seed, 0x02 + 4 * i);
    Rng feat_rng(seed, 0x03 + 4 * i);

    const double a = c.entry_rate;
    std::uint8_t d = chain_rng.next_bernoulli(a / (a + b)) ? 1 : 0;
    for (int t = 0; t < nq; ++t) {
      d_hist[static_cast<std::size_t>(t)] = d;
      d = d ? (chain_rng.next_bernoulli(b) ? 0 : 1) : (chain_rng.next_bernoulli(a) ? 1 : 0);
    }

    std::snprintf(id_buf, sizeof(id_buf), "c%07zu", i);
    std::snprintf(zip_buf, sizeof(zip_buf), "%05d", 10000 + c.zip_index);

    const double inc_std = (c.log_income - 10.4) / 0.65;
    int since_delinquent = 24;  // capped "never" sentinel

    for (int t = 0; t < nq; ++t) {
      ConsumerQuarter& r = panel.records[i * static_cast<std::size_t>(nq) + static_cast<std::size_t>(t)];
      r.consumer_id = id_buf;
      r.quarter = t;
      r.d_state = d_hist[static_cast<std::size_t>(t)];
      r.age = static_cast<std::int16_t>(std::min(c.age + t / 4, 110));
      r.income_est = static_cast<float>(c.income);
      r.zip = zip_buf;
      r.race = c.race;

      if (r.d_state) {
        since_delinquent = 0;
      } else if (since_delinquent < 24) {
        ++since_delinquent;
      }
      int count8 = 0;
      for (int k = std::max(0, t - 7); k <= t; ++k) count8 += d_hist[static_cast<std::size_t>(k)];

      // True probability that the next-8-quarter window contains a
      // delinquency, conditional on today's state.
      const double pd = r.d_state ? 1.0 - b * std::pow(1.0 - a, 7.0) : 1.0 - std::pow(1.0 - a, 8.0);
      r.true_pd = static_cast<float>(pd);

      auto& f = r.features;
      const double e_q = feat_rng.next_normal();  // shared quarter shock

      // Payment history (f001-f021): realized delinquency record plus noisy
      // echoes of the underlying propensity.
      f[kFeatCurrentDelinquent] = static_cast<float>(r.d_state);
      f[kFeatDelinquentCount8q] = static_cast<float>(count8);
      f[kFeatQuartersSinceDelinquent] = static_cast<float>(since_delinquent);
      f[3] = static_cast<float>(c.s_ph + 0.5 * feat_rng.next_normal());
      f[4] = static_cast<float>(c.s_ph + 0.9 * feat_rng.next_normal());
      f[5] = static_cast<float>(0.6 * c.s_ph + 0.4 * count8 + 0.8 * feat_rng.next_normal());
      for (std::size_t j = 6; j < 21; ++j) {
        const double signal = (j % 3 == 0) ? 0.35 * c.s_ph : 0.1 * c.s_ph;
        f[j] = static_cast<float>(signal + feat_rng.next_normal());
      }

      // Amounts owed (f022-f064): balances, limits, utilization.
      const double util = std::clamp(sigmoid(0.9 * c.s_ao + 0.5 * e_q), 0.02, 0.98);
      const double card_balance = c.income / 12.0 * (0.4 + 2.2 * util);
      const double card_limit = c.income * (0.15 + 0.20 * sigmoid(inc_std - 0.5 * c.s_ao));
      const bool card_inq = feat_rng.next_bernoulli(std::clamp(0.04 + 0.10 * sigmoid(c.s_nc), 0.0, 0.3));
      const bool card_orig = card_inq && feat_rng.next_bernoulli(0.05 + 0.30 * sigmoid(inc_std - c.rho));
      const double mort_balance = c.has_mortgage ? c.income * c.mortgage_mult : 0.0;
      const bool mort_inq = feat_rng.next_bernoulli(std::clamp(0.02 + 0.05 * sigmoid(inc_std), 0.0, 0.2));
      const bool mort_orig = mort_inq && feat_rng.next_bernoulli(0.03 + 0.25 * sigmoid(inc_std - c.rho));
      f[kFeatCardBalance] = static_cast<float>(card_balance);
      f[kFeatCardLimit] = static_cast<float>(card_limit);
      f[kFeatCardInquiry] = card_inq ? 1.0f : 0.0f;
      f[kFeatCardOrigination] = card_orig ? 1.0f : 0.0f;
      f[kFeatMortgageBalance] = static_cast<float>(mort_balance);
      f[kFeatMortgageInquiry] = mort_inq ? 1.0f : 0.0f;
      f[kFeatMortgageOrigination] = mort_orig ? 1.0f : 0.0f;
      f[kFeatUtilization] = static_cast<float>(util);
      f[29] = static_cast<float>(card_balance + mort_balance);
      f[30] = static_cast<float>(c.s_ao + 0.5 * feat_rng.next_normal());
      f[31] = static_cast<float>(c.s_ao + 0.9 * feat_rng.next_normal());
      f[32] = static_cast<float>(0.7 * c.s_ao + 0.3 * util + 0.6 * feat_rng.next_normal());
      for (std::size_t j = 33; j < 64; ++j) {
        const double signal = (j % 4 == 1) ? 0.4 * c.s_ao : 0.12 * c.s_ao;
        f[j] = static_cast<float>(signal + feat_rng.next_normal());
      }

      // Length of credit history (f065-f070).
      const double hist = c.history_years + t / 4.0;
      f[kFeatHistoryYears] = static_cast<float>(hist);
      f[65] = static_cast<float>(hist * 12.0 + 3.0 * feat_rng.next_normal());
      f[66] = static_cast<float>(std::max(0.0, hist * 12.0 * (0.2 + 0.2 * feat_rng.next_double())));
      for (std::size_t j = 67; j < 70; ++j) {
        f[j] = static_cast<float>(0.5 * c.s_lch + 0.9 * feat_rng.next_normal());
      }

      // Credit mix (f071-f075).
      f[kFeatProductTypes] = static_cast<float>(c.product_count);
      f[kFeatHasMortgage] = c.has_mortgage ? 1.0f : 0.0f;
      for (std::size_t j = 72; j < 75; ++j) {
        f[j] = static_cast<float>(0.5 * c.s_cm + 0.9 * feat_rng.next_normal());
      }

      // New credit (f076-f079).
      f[kFeatInquiries12m] = static_cast<float>(c.inquiries12);
      f[76] = static_cast<float>((card_inq ? 1.0 : 0.0) + (mort_inq ? 1.0 : 0.0));
      for (std::size_t j = 77; j < 79; ++j) {
        f[j] = static_cast<float>(0.5 * c.s_nc + 0.9 * feat_rng.next_normal());
      }

      // Credit-score latent: the published factor weights, which lean on
      // length-of-history and new-credit far more than the true index does,
      // plus idiosyncratic noise. The payment-history component mixes the
      // realized delinquency record with the underlying propensity, the way
      // graded payment attributes do. Negated so higher = safer.
      const double c8_scaled = (count8 - 0.6) / 1.2;
      const double ph_component = 0.55 * c8_scaled + 0.45 * c.s_ph;
      const double latent = -(0.35 * ph_component + 0.30 * c.s_ao + 0.15 * c.s_lch + 0.10 * c.s_cm +
                              0.10 * c.s_nc) +
                            config.score_noise_sd * feat_rng.next_normal();
      score_latent[i * static_cast<std::size_t>(nq) + static_cast<std::size_t>(t)] = latent;
      r.credit_score = -1;  // assigned below, per quarter
    }
  }

  // Per-quarter score assignment: percentile of the latent among scored
  // records, mapped onto the 300-850 scale.
  std::vector<std::size_t> scored_idx;
  std::vector<std::size_t> order;
  for (int t = 0; t < nq; ++t) {
    scored_idx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (consumers[i].scored) {
        scored_idx.push_back(i * static_cast<std::size_t>(nq) + static_cast<std::size_t>(t));
      }
    }
    const std::size_t m = scored_idx.size();
    if (m == 0) continue;
    order.assign(m, 0);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return score_latent[scored_idx[x]] < score_latent[scored_idx[y]];
    });
    for (std::size_t rank = 0; rank < m; ++rank) {
      const double pct = (static_cast<double>(rank) + 0.5) * 100.0 / static_cast<double>(m);
      panel.records[scored_idx[order[rank]]].credit_score =
          static_cast<std::int16_t>(percentile_to_score(pct));
    }
  }

  panel.canonicalize();
  return panel;
}

double realized_default_frequency(const Panel& panel) {
  std::uint64_t n_total = 0, n_default = 0;
  for (std::int32_t q = panel.quarter_min; q <= panel.quarter_max; ++q) {
    const LabeledRows rows = labeled_rows_at(panel, q);
    n_total += rows.label.size();
    for (int y : rows.label) n_default += static_cast<std::uint64_t>(y);
  }
  if (n_total == 0) fail(Errc::empty_input, "panel has no labelable records");
  return static_cast<double>(n_default) / static_cast<double>(n_total);
}

}  // namespace credkit::panel
