// Apache License, Version 2.0, refer to LICENSE.txt
//
// Classical competitors for the new-user prediction task. All of them read
// presence/arrival summaries only, never raw counts. Implemented forms:
//
//  - Jackknife (orders 1-4): the expected rarefaction curve at D0-j days is
//    an exact linear functional of the first j presence-spectrum values; the
//    order-k predictor extrapolates the polynomial through the k+1 rightmost
//    curve points forward to D0+D1 days.
//  - Good-Toulmin: the alternating series -sum_k (-t)^k phi_k with
//    t = D1/D0; for t > 1 the series is Euler-smoothed with binomial weights
//    P(L >= k), L ~ Bin(l, 2/(t+2)), l = ceil(log2(N t^2/(t-1)) / 2).
//  - Beta-binomial: per-day presence Bernoulli(theta), theta ~ Beta(a, b);
//    (a, b) maximize the zero-truncated beta-binomial likelihood of the
//    spectrum, and the prediction extrapolates a capped population.
//  - Beta-geometric: first-trigger day Geometric(theta), theta ~ Beta(a, b),
//    fit on the truncated arrival histogram; extrapolation by Monte Carlo
//    over the unseen users' posterior rates.

#ifndef ABHORIZON_BASELINES_HPP
#define ABHORIZON_BASELINES_HPP

#include <cstdint>
#include <optional>
#include <span>

#include "abhorizon/trigger_data.hpp"

namespace abh {

enum class BaselineId { kJk1, kJk2, kJk3, kJk4, kGt, kBb, kBg };

/// Order-k jackknife prediction of new distinct users over d1 further days.
/// Requires order in 1..4 and d0 >= order. Clamped to be nonnegative.
double jackknife_predict(const FreqSpectrum& spectrum, int d0, int d1,
                         int order);

struct GtOptions {
  bool smooth_beyond_pilot = true;  // Euler smoothing when d1 > d0
};

double good_toulmin_predict(const FreqSpectrum& spectrum, int d0, int d1,
                            const GtOptions& options = {});

struct BbOptions {
  double population_cap_factor = 10.0;      // N_inf = factor * N when unset
  std::optional<double> population_cap;
  std::uint64_t fit_seed = 20240521;        // seeds the likelihood optimizer
};

double beta_binomial_predict(const FreqSpectrum& spectrum, int d0, int d1,
                             const BbOptions& options = {});

struct BgOptions {
  int mc_draws = 4000;
};

/// `daily_new_users` holds the per-day first-trigger counts for days 1..D0.
double beta_geometric_predict(std::span<const std::int64_t> daily_new_users,
                              int d1, std::uint64_t seed,
                              const BgOptions& options = {});

}  // namespace abh

#endif  // ABHORIZON_BASELINES_HPP
