// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "abhorizon/fit.hpp"
#include "abhorizon/rng.hpp"
#include "abhorizon/special.hpp"

namespace abh {

namespace {

// P(a user present on k of d0 days is missed by a uniform subset of
// d0 - j days) = C(d0-k, d0-j) / C(d0, d0-j).
double miss_probability(int d0, int k, int j) {
  if (j < k) return 0.0;
  double p = 1.0;
  // C(d0-k, d0-j)/C(d0, d0-j) = prod_{i=0..j-1} (d0-k-i) / (d0-i) restricted
  // to the j removed days.
  for (int i = 0; i < k; ++i) {
    p *= static_cast<double>(j - i) / static_cast<double>(d0 - i);
  }
  return p;
}

}  // namespace

double jackknife_predict(const FreqSpectrum& spectrum, int d0, int d1,
                         int order) {
  if (order < 1 || order > 4) {
    throw std::invalid_argument("jackknife_predict: order must be 1..4");
  }
  if (d0 < order) {
    throw std::invalid_argument("jackknife_predict: needs d0 >= order");
  }
  if (d1 < 0) throw std::invalid_argument("jackknife_predict: d1 < 0");
  const double n = static_cast<double>(spectrum.total_users());
  if (n == 0.0 || d1 == 0) return 0.0;

  // Expected distinct-user curve at d0 - j days, j = 0..order.
  std::vector<double> curve(order + 1, n);
  for (int j = 1; j <= order; ++j) {
    for (const auto& [k, phi] : spectrum.phi) {
      curve[j] -= static_cast<double>(phi) * miss_probability(d0, k, j);
    }
  }
  // Lagrange extrapolation of the degree-`order` polynomial through
  // (j, curve[j]) to j = -d1, i.e. d0 + d1 observation days.
  const double target = -static_cast<double>(d1);
  double extrapolated = 0.0;
  for (int j = 0; j <= order; ++j) {
    double weight = 1.0;
    for (int i = 0; i <= order; ++i) {
      if (i == j) continue;
      weight *= (target - i) / static_cast<double>(j - i);
    }
    extrapolated += weight * curve[j];
  }
  return std::max(0.0, extrapolated - n);
}

double good_toulmin_predict(const FreqSpectrum& spectrum, int d0, int d1,
                            const GtOptions& options) {
  if (d0 < 1 || d1 < 0) {
    throw std::invalid_argument("good_toulmin_predict: bad window");
  }
  const double n = static_cast<double>(spectrum.total_users());
  if (n == 0.0 || d1 == 0) return 0.0;
  const double t = static_cast<double>(d1) / d0;

  // Binomial smoothing weights kick in only past the pilot horizon.
  double smooth_q = 0.0;
  int smooth_l = 0;
  if (t > 1.0 && options.smooth_beyond_pilot) {
    smooth_q = 2.0 / (t + 2.0);
    const double arg = n * t * t / std::max(t - 1.0, 1e-9);
    smooth_l = std::clamp(
        static_cast<int>(std::ceil(0.5 * std::log2(std::max(arg, 2.0)))), 1,
        64);
  }

  double estimate = 0.0;
  for (const auto& [k, phi] : spectrum.phi) {
    double weight = 1.0;
    if (smooth_l > 0) {
      // P(L >= k), L ~ Binomial(smooth_l, smooth_q).
      if (k > smooth_l) {
        weight = 0.0;
      } else {
        double cdf = 0.0;
        for (int i = 0; i < k; ++i) {
          cdf += std::exp(log_binom_real(smooth_l, i) +
                          i * std::log(smooth_q) +
                          (smooth_l - i) * std::log1p(-smooth_q));
        }
        weight = 1.0 - cdf;
      }
      if (weight <= 0.0) continue;
    }
    estimate -= std::pow(-t, k) * static_cast<double>(phi) * weight;
  }
  return std::max(0.0, estimate);
}

namespace {

// Two-parameter box maximization, shared by the BB and BG fits.
std::pair<double, double> fit_beta_mixture(
    const std::function<double(double, double)>& log_lik, std::uint64_t seed) {
  const Box log_box{std::log(1e-3), std::log(1e3)};
  const std::array<Box, 2> boxes{log_box, log_box};
  DEConfig config;
  config.max_iters = 200;
  config.seed = seed;
  const auto objective = [&](std::span<const double> u) {
    return -log_lik(std::exp(u[0]), std::exp(u[1]));
  };
  const DEResult de = differential_evolution(objective, boxes, config);
  return {std::exp(de.x[0]), std::exp(de.x[1])};
}

}  // namespace

double beta_binomial_predict(const FreqSpectrum& spectrum, int d0, int d1,
                             const BbOptions& options) {
  if (d0 < 1 || d1 < 0) {
    throw std::invalid_argument("beta_binomial_predict: bad window");
  }
  const double n = static_cast<double>(spectrum.total_users());
  if (n == 0.0 || d1 == 0) return 0.0;

  bool all_full = true;
  for (const auto& [k, phi] : spectrum.phi) {
    if (k != d0 && phi > 0) all_full = false;
  }
  if (all_full) {
    std::cerr << "warning: beta-binomial fit on a saturated spectrum is "
                 "nearly flat\n";
  }

  // Zero-truncated beta-binomial likelihood of the presence counts.
  const auto log_lik = [&](double a, double b) {
    const double lb = log_beta(a, b);
    const double log_p_miss = log_beta(a, b + d0) - lb;
    const double log_p_seen = std::log(-std::expm1(log_p_miss));
    double ll = 0.0;
    for (const auto& [k, phi] : spectrum.phi) {
      ll += static_cast<double>(phi) *
            (log_binom_real(d0, k) + log_beta(a + k, b + d0 - k) - lb -
             log_p_seen);
    }
    return ll;
  };
  const auto [a, b] = fit_beta_mixture(log_lik, options.fit_seed);

  const double cap = options.population_cap.value_or(
      options.population_cap_factor * n);
  // Expected users first seen in (d0, d0+d1] under the fitted prior.
  const double lb = log_beta(a, b);
  const double p_miss_d0 = std::exp(log_beta(a, b + d0) - lb);
  const double p_miss_both = std::exp(log_beta(a, b + d0 + d1) - lb);
  return std::max(0.0, cap * (p_miss_d0 - p_miss_both));
}

double beta_geometric_predict(std::span<const std::int64_t> daily_new_users,
                              int d1, std::uint64_t seed,
                              const BgOptions& options) {
  const int d0 = static_cast<int>(daily_new_users.size());
  if (d0 < 2) {
    throw std::invalid_argument("beta_geometric_predict: needs d0 >= 2");
  }
  if (d1 < 0) throw std::invalid_argument("beta_geometric_predict: d1 < 0");
  if (options.mc_draws < 1) {
    throw std::invalid_argument("beta_geometric_predict: mc_draws < 1");
  }
  double n = 0.0;
  for (const std::int64_t arrivals : daily_new_users) {
    if (arrivals < 0) {
      throw std::invalid_argument("beta_geometric_predict: negative arrivals");
    }
    n += static_cast<double>(arrivals);
  }
  if (n == 0.0 || d1 == 0) return 0.0;
  if (daily_new_users[0] == static_cast<std::int64_t>(n)) {
    std::cerr << "warning: beta-geometric fit with every arrival on day 1\n";
  }

  // First-trigger day histogram likelihood, truncated to d <= d0:
  // P(first = d) = B(a+1, b+d-1) / B(a, b).
  const auto log_lik = [&](double a, double b) {
    const double lb = log_beta(a, b);
    const double log_p_late = log_beta(a, b + d0) - lb;  // P(first > d0)
    const double log_p_seen = std::log(-std::expm1(log_p_late));
    double ll = 0.0;
    for (int d = 1; d <= d0; ++d) {
      if (daily_new_users[d - 1] == 0) continue;
      ll += static_cast<double>(daily_new_users[d - 1]) *
            (log_beta(a + 1.0, b + d - 1.0) - lb - log_p_seen);
    }
    return ll;
  };
  const auto [a, b] = fit_beta_mixture(log_lik, seed ^ 0x5bd1e995);

  const double p_late = std::exp(log_beta(a, b + d0) - log_beta(a, b));
  const double unseen = n / std::max(1.0 - p_late, 1e-12) - n;
  if (unseen <= 0.0) return 0.0;

  // Unseen users carry posterior rate Beta(a, b + d0); each triggers within
  // d1 days with probability 1 - (1-theta)^d1. The expectation is taken by
  // Monte Carlo on the size-biased law Beta(a+1, b+d0), whose integrand
  // [1-(1-theta)^d1]/theta is bounded by d1; naive sampling of Beta(a, .)
  // collapses for the tiny fitted a this model often produces.
  const double mean_rate = a / (a + b + d0);
  SplitRng rng(seed);
  double acc = 0.0;
  for (int i = 0; i < options.mc_draws; ++i) {
    const double theta = beta_draw(rng, a + 1.0, b + d0);
    const double hit = -std::expm1(static_cast<double>(d1) * std::log1p(-theta));
    acc += theta > 0.0 ? hit / theta : static_cast<double>(d1);
  }
  return std::max(0.0, unseen * mean_rate * acc / options.mc_draws);
}

}  // namespace abh
