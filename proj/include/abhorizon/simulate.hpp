// Apache License, Version 2.0, refer to LICENSE.txt
//
// Exact generative samplers. The model sampler runs the sequential
// day-by-day scheme induced by the predictive laws: draw the day's new-user
// count, give each new user a latent jump and a first count, then let every
// known user re-trigger from its posterior rate law. The Zipf generator is
// the power-law benchmark data source.

#ifndef ABHORIZON_SIMULATE_HPP
#define ABHORIZON_SIMULATE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "abhorizon/nbp.hpp"
#include "abhorizon/rng.hpp"
#include "abhorizon/trigger_data.hpp"

namespace abh {

struct ModelSimConfig {
  HyperParams params;
  int days;
  std::uint64_t seed;
};

struct ZipfSimConfig {
  double tau;             // user n triggers with rate n^-tau
  std::int64_t n_users;   // population cap
  int days;
  std::uint64_t seed;
};

TriggerData sample_model(const ModelSimConfig& config);
TriggerData sample_zipf(const ZipfSimConfig& config);

/// Sampler for the latent jump of a user first seen after d observed days,
/// with density proportional to (1-s)^(r d) (1 - (1-s)^r) s^(-1-sigma) on
/// (0, 1). Piecewise inverse CDF over a log-spaced grid with an exact
/// rejection correction; build once per (sigma, r, d) and draw repeatedly.
class NewUserJumpSampler {
 public:
  NewUserJumpSampler(double sigma, double r, int days_observed);

  /// Process-wide cache: grids are reused across draws with the same
  /// parameters (continuations rebuild the same day repeatedly).
  static std::shared_ptr<const NewUserJumpSampler> shared(double sigma,
                                                          double r,
                                                          int days_observed);

  double draw(SplitRng& rng) const;

 private:
  double density_slow_part(double s) const;  // (1-s)^(rd) (1 - (1-s)^r)

  double sigma_;
  double r_;
  int days_observed_;
  double first_cell_bound_;            // envelope constant on (0, knots_[0]]
  std::vector<double> knots_;          // cell edges, last one == 1
  std::vector<double> cell_bounds_;    // sup of the slow part per cell
  std::vector<double> cum_weights_;    // cumulative envelope masses
};

/// One draw from the jump density above.
double sample_new_user_jump(double sigma, double r, int days_observed,
                            SplitRng& rng);

/// First-day count mass function printed with the marginal form of the
/// sampling scheme, kept as an optional cross-check of the canonical
/// jump-based route: pmf(l) proportional to
/// Gamma(l + r - 1) / Gamma(l) * B(l - sigma, r d + 1), l >= 1.
std::vector<double> marginal_new_user_count_pmf(double sigma, double r,
                                                int days_observed,
                                                int max_count);

/// New-user side of a continuation: starting from a pilot with
/// `pilot_users` distinct users after `pilot_days` days, simulates `horizon`
/// further days and reports how many new users appeared and their window
/// frequencies. Previously seen users never influence these statistics, so
/// they are not simulated.
struct WindowStats {
  std::int64_t new_users = 0;
  std::map<std::int64_t, std::int64_t> new_by_freq;
};

WindowStats sample_window_new_users(const HyperParams& params,
                                    std::int64_t pilot_users, int pilot_days,
                                    int horizon, SplitRng& rng);

}  // namespace abh

#endif  // ABHORIZON_SIMULATE_HPP
