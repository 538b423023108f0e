// Apache License, Version 2.0, refer to LICENSE.txt
//
// Closed-form posterior and predictive laws of the negative-binomial
// scaled-stable model, plus the marginal likelihood the empirical-Bayes fit
// maximizes. Point predictions are deterministic (closed form); credible
// intervals for the compound sums use seeded Monte Carlo.

#ifndef ABHORIZON_NBP_HPP
#define ABHORIZON_NBP_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "abhorizon/distributions.hpp"
#include "abhorizon/special.hpp"
#include "abhorizon/trigger_data.hpp"

namespace abh {

/// Model hyperparameters: tilting mass beta, stable index sigma, tilting
/// shape c, negative-binomial failure parameter r.
struct HyperParams {
  double beta;
  double sigma;
  double c;
  double r;

  void validate() const;
};

/// Law of the (-sigma power of the) tilted largest jump given the pilot:
/// Gamma(N + c + 1, beta + psi_0^(D0)).
GammaDist largest_jump_posterior(const HyperParams& params,
                                 const SuffStats& stats);

/// Per-user beta factor of the marginal likelihood.
/// kPosteriorConsistent uses B(m_n - sigma, r D0 + 1), the normalizer of the
/// posterior rate law, and is the form under which the sequential predictive
/// product reproduces the marginal exactly (see the test suite). kAsWritten
/// keeps B(r D0 + 1, m_n - sigma + 1) for comparison; it is not consistent
/// with the posterior laws and is never used by the fitters.
enum class XiConvention { kPosteriorConsistent, kAsWritten };

/// Log marginal likelihood of the pilot sample. Empty pilots are legal.
double log_marginal_likelihood(
    const HyperParams& params, const SuffStats& stats,
    XiConvention conv = XiConvention::kPosteriorConsistent);

/// Posterior law of the number of users first seen within `horizon` days
/// after the pilot. horizon == 0 yields a point mass at zero.
NegBinDist predict_new_users(const HyperParams& params, const SuffStats& stats,
                             int horizon);

/// Same, restricted to users whose total count over the horizon equals j.
NegBinDist predict_new_users_freq(const HyperParams& params,
                                  const SuffStats& stats, int horizon, int j,
                                  RhoConvention conv = RhoConvention::kNegBinPmf);

/// Posterior rate law for a pilot user with total count m_n:
/// Beta(m_n - sigma, r * D0 + 1).
BetaDist posterior_jump(const HyperParams& params, std::int64_t user_total,
                        int pilot_days);

struct Interval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Future re-trigger volume of pilot users. The mean is closed form,
/// (D1/D0) * sum_n (m_n - sigma); the interval comes from `n_mc` seeded
/// replicates of the compound Beta / NegBin law.
Interval predict_old_users_sum(const HyperParams& params,
                               const SuffStats& stats, int horizon, int n_mc,
                               std::uint64_t seed, double level = 0.95);

/// Total future activity: sum over j of j * U_j plus the old-user volume.
/// The frequency sum is auto-extended past j_max until its tail bound drops
/// below 1e-6 of the running mean.
Interval predict_total(const HyperParams& params, const SuffStats& stats,
                       int horizon, int j_max, int n_mc, std::uint64_t seed,
                       double level = 0.95,
                       RhoConvention conv = RhoConvention::kNegBinPmf);

struct FreqForecast {
  int j;
  Interval interval;
};

/// Bundled forecast at one horizon. old_sum/total are absent when the pilot
/// statistics carry no per-user counts (aggregate-only sources).
struct ForecastReport {
  int pilot_days = 0;
  int horizon = 0;
  double level = 0.95;
  std::uint64_t seed = 0;
  Interval new_users;
  std::vector<FreqForecast> new_by_freq;
  std::optional<Interval> old_sum;
  std::optional<Interval> total;
};

ForecastReport make_forecast(const HyperParams& params, const SuffStats& stats,
                             int horizon, int freq_max, double level, int n_mc,
                             std::uint64_t seed,
                             RhoConvention conv = RhoConvention::kNegBinPmf);

}  // namespace abh

#endif  // ABHORIZON_NBP_HPP
