// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/nbp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "abhorizon/rng.hpp"

namespace abh {

void HyperParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("HyperParams: beta must be positive and finite");
  }
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::domain_error("HyperParams: sigma must lie in (0, 1)");
  }
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::domain_error("HyperParams: c must be nonnegative and finite");
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::domain_error("HyperParams: r must be positive and finite");
  }
}

GammaDist largest_jump_posterior(const HyperParams& params,
                                 const SuffStats& stats) {
  params.validate();
  const double mass = psi(params.sigma, params.r, 0.0, stats.pilot_days);
  return GammaDist{static_cast<double>(stats.num_users) + params.c + 1.0,
                   params.beta + mass};
}

double log_marginal_likelihood(const HyperParams& params,
                               const SuffStats& stats, XiConvention conv) {
  params.validate();
  const double n = static_cast<double>(stats.num_users);
  const double d0 = stats.pilot_days;
  const double mass = psi(params.sigma, params.r, 0.0, d0);
  double ll = n * std::log(params.sigma) +
              (params.c + 1.0) * std::log(params.beta) -
              (n + params.c + 1.0) * std::log(params.beta + mass) +
              std::lgamma(n + params.c + 1.0) - std::lgamma(params.c + 1.0);
  // Per-user factor, collapsed over identical values. The binomial part runs
  // over every positive day-user cell, the beta part over users.
  for (const auto& [count, cells] : stats.count_hist) {
    ll += cells * log_binom_real(static_cast<double>(count) + params.r - 1.0,
                                 static_cast<int>(count));
  }
  for (const auto& [total, users] : stats.total_hist) {
    const double m = static_cast<double>(total);
    ll += conv == XiConvention::kPosteriorConsistent
              ? users * log_beta(m - params.sigma, params.r * d0 + 1.0)
              : users * log_beta(params.r * d0 + 1.0, m - params.sigma + 1.0);
  }
  return ll;
}

NegBinDist predict_new_users(const HyperParams& params, const SuffStats& stats,
                             int horizon) {
  params.validate();
  if (horizon < 0) throw std::domain_error("predict_new_users: horizon < 0");
  const double failures = static_cast<double>(stats.num_users) + params.c + 1.0;
  if (horizon == 0) return NegBinDist{failures, 0.0};
  const double d0 = stats.pilot_days;
  const double gained = psi(params.sigma, params.r, d0, horizon);
  const double full = psi(params.sigma, params.r, 0.0, d0 + horizon);
  return NegBinDist{failures, gained / (params.beta + full)};
}

NegBinDist predict_new_users_freq(const HyperParams& params,
                                  const SuffStats& stats, int horizon, int j,
                                  RhoConvention conv) {
  params.validate();
  if (j < 1) throw std::domain_error("predict_new_users_freq: j must be >= 1");
  const double failures = static_cast<double>(stats.num_users) + params.c + 1.0;
  if (horizon == 0) return NegBinDist{failures, 0.0};
  const double mass_j =
      rho(j, params.sigma, params.r, stats.pilot_days, horizon, conv);
  const double seen = psi(params.sigma, params.r, 0.0, stats.pilot_days);
  return NegBinDist{failures, mass_j / (params.beta + seen + mass_j)};
}

BetaDist posterior_jump(const HyperParams& params, std::int64_t user_total,
                        int pilot_days) {
  params.validate();
  if (user_total < 1) {
    throw std::domain_error("posterior_jump: user total must be >= 1");
  }
  if (pilot_days < 1) {
    throw std::domain_error("posterior_jump: pilot_days must be >= 1");
  }
  return BetaDist{static_cast<double>(user_total) - params.sigma,
                  params.r * pilot_days + 1.0};
}

namespace {

// Empirical central interval with linear interpolation on the sorted sample.
std::pair<double, double> central_interval(std::vector<double>& sample,
                                           double level) {
  std::sort(sample.begin(), sample.end());
  const auto at = [&](double q) {
    const double pos = q * (static_cast<double>(sample.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= sample.size()) return sample.back();
    const double frac = pos - static_cast<double>(i);
    return sample[i] * (1.0 - frac) + sample[i + 1] * frac;
  };
  const double alpha = 1.0 - level;
  return {at(alpha / 2.0), at(1.0 - alpha / 2.0)};
}

double old_sum_mean(const HyperParams& params, const SuffStats& stats,
                    int horizon) {
  double acc = 0.0;
  for (const auto& [total, users] : stats.total_hist) {
    acc += users * (static_cast<double>(total) - params.sigma);
  }
  return acc * static_cast<double>(horizon) / stats.pilot_days;
}

std::int64_t draw_old_sum(SplitRng& rng, const HyperParams& params,
                          const SuffStats& stats, int horizon) {
  std::int64_t sum = 0;
  for (const std::int64_t m : stats.totals) {
    const double jump =
        std::min(beta_draw(rng, static_cast<double>(m) - params.sigma,
                           params.r * stats.pilot_days + 1.0),
                 1.0 - 1e-12);
    sum += negbin_draw(rng, params.r * horizon, jump);
  }
  return sum;
}

void check_mc(int n_mc) {
  if (n_mc < 2) throw std::domain_error("n_mc must be >= 2");
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("credible level must lie in (0, 1)");
  }
}

}  // namespace

Interval predict_old_users_sum(const HyperParams& params,
                               const SuffStats& stats, int horizon, int n_mc,
                               std::uint64_t seed, double level) {
  params.validate();
  check_level(level);
  if (horizon < 0) throw std::domain_error("predict_old_users_sum: horizon < 0");
  if (stats.num_users == 0 || horizon == 0) return Interval{0.0, 0.0, 0.0};
  if (stats.totals.empty()) {
    throw std::invalid_argument(
        "predict_old_users_sum: statistics carry no per-user totals");
  }
  check_mc(n_mc);
  Interval out;
  out.mean = old_sum_mean(params, stats, horizon);
  std::vector<double> sample(static_cast<std::size_t>(n_mc));
  SplitRng root(seed);
  for (int rep = 0; rep < n_mc; ++rep) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(rep));
    sample[rep] = static_cast<double>(draw_old_sum(rng, params, stats, horizon));
  }
  auto [lo, hi] = central_interval(sample, level);
  out.lo = std::min(lo, out.mean);
  out.hi = std::max(hi, out.mean);
  return out;
}

Interval predict_total(const HyperParams& params, const SuffStats& stats,
                       int horizon, int j_max, int n_mc, std::uint64_t seed,
                       double level, RhoConvention conv) {
  params.validate();
  check_level(level);
  if (j_max < 1) throw std::domain_error("predict_total: j_max must be >= 1");
  if (horizon < 0) throw std::domain_error("predict_total: horizon < 0");
  if (horizon == 0) return Interval{0.0, 0.0, 0.0};
  if (stats.num_users > 0 && stats.totals.empty()) {
    throw std::invalid_argument(
        "predict_total: statistics carry no per-user totals");
  }
  check_mc(n_mc);

  const double d0 = stats.pilot_days;
  const double seen = psi(params.sigma, params.r, 0.0, d0);
  const double failures = static_cast<double>(stats.num_users) + params.c + 1.0;

  // Frequency masses, extended until the polynomial tail is negligible:
  // j * rho_j decays like j^(-r*D0 - 1), so the remainder past j is bounded
  // by term_j * (j + 1) / (r * D0).
  std::vector<double> masses;  // rho_j for j = 1..j_eff
  double freq_mean = 0.0;
  constexpr int kHardCap = 200000;
  for (int j = 1; j <= kHardCap; ++j) {
    const double mass_j =
        rho(j, params.sigma, params.r, stats.pilot_days, horizon, conv);
    masses.push_back(mass_j);
    const double term = failures * j * mass_j / (params.beta + seen);
    freq_mean += term;
    if (j >= j_max) {
      const double tail_bound = term * (j + 1.0) / (params.r * d0);
      if (tail_bound < 1e-6 * std::max(freq_mean, 1e-300)) break;
    }
  }

  Interval out;
  const double old_mean =
      stats.num_users > 0 ? old_sum_mean(params, stats, horizon) : 0.0;
  out.mean = freq_mean + old_mean;

  // Replicates compose the two posteriors through the shared largest jump:
  // a gamma weight, conditionally independent Poisson counts per frequency,
  // plus the old-user compound sum.
  const GammaDist jump_law = largest_jump_posterior(params, stats);
  std::vector<double> sample(static_cast<std::size_t>(n_mc));
  SplitRng root(seed);
  for (int rep = 0; rep < n_mc; ++rep) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(rep));
    const double weight = gamma_draw(rng, jump_law.shape, jump_law.rate);
    double total = 0.0;
    for (std::size_t idx = 0; idx < masses.size(); ++idx) {
      const std::int64_t users = poisson_draw(rng, weight * masses[idx]);
      total += static_cast<double>(users) * static_cast<double>(idx + 1);
    }
    if (stats.num_users > 0) {
      total += static_cast<double>(draw_old_sum(rng, params, stats, horizon));
    }
    sample[rep] = total;
  }
  auto [lo, hi] = central_interval(sample, level);
  out.lo = std::min(lo, out.mean);
  out.hi = std::max(hi, out.mean);
  return out;
}

ForecastReport make_forecast(const HyperParams& params, const SuffStats& stats,
                             int horizon, int freq_max, double level, int n_mc,
                             std::uint64_t seed, RhoConvention conv) {
  params.validate();
  check_level(level);
  if (freq_max < 1) throw std::domain_error("make_forecast: freq_max must be >= 1");
  if (horizon < 0) throw std::domain_error("make_forecast: horizon < 0");

  ForecastReport report;
  report.pilot_days = stats.pilot_days;
  report.horizon = horizon;
  report.level = level;
  report.seed = seed;

  const NegBinDist new_users = predict_new_users(params, stats, horizon);
  const auto [nu_lo, nu_hi] = negbin_interval(new_users, level);
  report.new_users = Interval{new_users.mean(),
                              std::min<double>(nu_lo, new_users.mean()),
                              std::max<double>(nu_hi, new_users.mean())};

  report.new_by_freq.reserve(static_cast<std::size_t>(freq_max));
  for (int j = 1; j <= freq_max; ++j) {
    const NegBinDist by_j =
        horizon == 0 ? NegBinDist{new_users.failures, 0.0}
                     : predict_new_users_freq(params, stats, horizon, j, conv);
    const auto [lo, hi] = negbin_interval(by_j, level);
    report.new_by_freq.push_back(
        {j, Interval{by_j.mean(), std::min<double>(lo, by_j.mean()),
                     std::max<double>(hi, by_j.mean())}});
  }

  const bool has_retrigger_info =
      stats.num_users == 0 ||
      stats.totals.size() == static_cast<std::size_t>(stats.num_users);
  if (has_retrigger_info) {
    report.old_sum =
        predict_old_users_sum(params, stats, horizon, n_mc, seed, level);
    report.total = predict_total(params, stats, horizon,
                                 std::max(freq_max, 50), n_mc, seed + 1, level,
                                 conv);
  }
  return report;
}

}  // namespace abh
