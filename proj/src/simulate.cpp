// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <tuple>
#include <stdexcept>
#include <string>

namespace abh {

namespace {

constexpr int kGridCells = 64;

std::string user_id(std::int64_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "u%0*lld", std::min(width, 20),
                static_cast<long long>(n));
  return std::string(buf);
}

}  // namespace

double NewUserJumpSampler::density_slow_part(double s) const {
  const double l = std::log1p(-s);  // <= 0, -inf at s == 1
  const double decay =
      days_observed_ == 0 ? 1.0 : std::exp(r_ * days_observed_ * l);
  return decay * (-std::expm1(r_ * l));
}

NewUserJumpSampler::NewUserJumpSampler(double sigma, double r,
                                       int days_observed)
    : sigma_(sigma), r_(r), days_observed_(days_observed) {
  if (!(sigma > 0.0 && sigma < 1.0) || !(r > 0.0) || days_observed < 0) {
    throw std::domain_error("NewUserJumpSampler: invalid parameters");
  }
  // The slow part w(s) = (1-s)^(rd) (1 - (1-s)^r) is unimodal with its peak
  // at s* = 1 - (d/(d+1))^(1/r); per-cell suprema are exact from that.
  const double peak =
      days_observed == 0
          ? 1.0
          : -std::expm1(std::log(static_cast<double>(days_observed) /
                                 (days_observed + 1.0)) /
                        r);
  const double s1 = std::min(1e-6, peak / 2.0);
  knots_.resize(kGridCells + 1);
  const double log_s1 = std::log(s1);
  for (int k = 0; k <= kGridCells; ++k) {
    knots_[k] = std::exp(log_s1 * (1.0 - static_cast<double>(k) / kGridCells));
  }
  knots_.back() = 1.0;

  // Head cell (0, s1]: w(s)/s is bounded by r for r >= 1 and by its value at
  // s1 for r < 1; the envelope there is bound * s^-sigma.
  first_cell_bound_ = std::max(r, -std::expm1(r * std::log1p(-s1)) / s1);

  cell_bounds_.resize(kGridCells);
  cum_weights_.resize(kGridCells + 1);
  cum_weights_[0] =
      first_cell_bound_ * std::pow(s1, 1.0 - sigma_) / (1.0 - sigma_);
  for (int k = 0; k < kGridCells; ++k) {
    const double a = knots_[k];
    const double b = knots_[k + 1];
    double sup;
    if (peak <= a) {
      sup = density_slow_part(a);
    } else if (peak >= b) {
      sup = density_slow_part(b);
    } else {
      sup = density_slow_part(peak);
    }
    cell_bounds_[k] = sup;
    const double mass =
        sup * (std::pow(a, -sigma_) - std::pow(b, -sigma_)) / sigma_;
    cum_weights_[k + 1] = cum_weights_[k] + mass;
  }
  if (!(cum_weights_.back() > 0.0)) {
    throw std::runtime_error("NewUserJumpSampler: degenerate envelope");
  }
}

double NewUserJumpSampler::draw(SplitRng& rng) const {
  const double total = cum_weights_.back();
  while (true) {
    const double pick = rng.next_double() * total;
    const auto it =
        std::upper_bound(cum_weights_.begin(), cum_weights_.end(), pick);
    const int cell =
        std::min<int>(kGridCells,
                      static_cast<int>(it - cum_weights_.begin())) -
        1;
    double s, accept;
    if (cell < 0) {
      // Head cell: inverse CDF of s^-sigma envelope restricted to (0, s1].
      const double u = rng.next_open_double();
      s = std::max(knots_[0] * std::pow(u, 1.0 / (1.0 - sigma_)), 1e-300);
      accept = density_slow_part(s) / (s * first_cell_bound_);
    } else {
      const double a = knots_[cell];
      const double b = knots_[cell + 1];
      const double u = rng.next_double();
      const double pa = std::pow(a, -sigma_);
      const double pb = std::pow(b, -sigma_);
      s = std::pow(pa - u * (pa - pb), -1.0 / sigma_);
      accept = density_slow_part(s) / cell_bounds_[cell];
    }
    if (rng.next_double() < accept) return std::min(s, 1.0 - 1e-15);
  }
}

std::shared_ptr<const NewUserJumpSampler> NewUserJumpSampler::shared(
    double sigma, double r, int days_observed) {
  using Key = std::tuple<double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const NewUserJumpSampler>> cache;
  const Key key{sigma, r, days_observed};
  std::lock_guard<std::mutex> lock(mutex);
  const auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() >= 4096) cache.clear();
  auto sampler =
      std::make_shared<const NewUserJumpSampler>(sigma, r, days_observed);
  cache.emplace(key, sampler);
  return sampler;
}

double sample_new_user_jump(double sigma, double r, int days_observed,
                            SplitRng& rng) {
  return NewUserJumpSampler::shared(sigma, r, days_observed)->draw(rng);
}

std::vector<double> marginal_new_user_count_pmf(double sigma, double r,
                                                int days_observed,
                                                int max_count) {
  if (max_count < 1) {
    throw std::domain_error("marginal_new_user_count_pmf: max_count >= 1");
  }
  std::vector<double> mass(static_cast<std::size_t>(max_count));
  double total = 0.0;
  for (int l = 1; l <= max_count; ++l) {
    const double log_mass = std::lgamma(l + r - 1.0) - std::lgamma(l) +
                            log_beta(l - sigma, r * days_observed + 1.0);
    mass[l - 1] = std::exp(log_mass);
    total += mass[l - 1];
  }
  for (double& m : mass) m /= total;
  return mass;
}

namespace {

struct SimUser {
  std::int64_t total = 0;
  std::vector<DayCount> entries;
};

// Day step shared by the full sampler and continuations. `users` holds every
// user being tracked; `tracked_offset` is how many untracked users also count
// toward N. Returns the number of new users born.
std::int64_t urn_day_step(const HyperParams& params, int day_index,
                          std::int64_t untracked_users,
                          std::vector<SimUser>& users, SplitRng& rng) {
  const double d = day_index;  // days already generated
  // Known users first, from their current rate posteriors.
  for (SimUser& user : users) {
    const double jump = std::min(
        beta_draw(rng, static_cast<double>(user.total) - params.sigma,
                  params.r * d + 1.0),
        1.0 - 1e-12);
    const std::int64_t count = negbin_draw(rng, params.r, jump);
    if (count > 0) {
      user.entries.push_back({day_index + 1, count});
      user.total += count;
    }
  }
  // New arrivals.
  const double p = psi(params.sigma, params.r, d, 1.0) /
                   (params.beta + psi(params.sigma, params.r, 0.0, d + 1.0));
  const double known =
      static_cast<double>(untracked_users) + static_cast<double>(users.size());
  const std::int64_t born = negbin_draw(rng, known + params.c + 1.0, p);
  if (born > 0) {
    const auto jump_sampler =
        NewUserJumpSampler::shared(params.sigma, params.r, day_index);
    for (std::int64_t i = 0; i < born; ++i) {
      const double jump = jump_sampler->draw(rng);
      const std::int64_t count = truncated_negbin_draw(rng, params.r, jump);
      SimUser user;
      user.total = count;
      user.entries.push_back({day_index + 1, count});
      users.push_back(std::move(user));
    }
  }
  return born;
}

}  // namespace

TriggerData sample_model(const ModelSimConfig& config) {
  config.params.validate();
  if (config.days < 0) throw std::domain_error("sample_model: days < 0");
  SplitRng root(config.seed);
  std::vector<SimUser> users;
  for (int d = 0; d < config.days; ++d) {
    SplitRng day_rng = root.split(static_cast<std::uint64_t>(d));
    urn_day_step(config.params, d, 0, users, day_rng);
  }
  TriggerData::Builder builder(config.days);
  for (std::size_t n = 0; n < users.size(); ++n) {
    const std::string id = user_id(static_cast<std::int64_t>(n) + 1, 8);
    for (const DayCount& entry : users[n].entries) {
      builder.add(entry.day, id, entry.count);
    }
  }
  return std::move(builder).build();
}

WindowStats sample_window_new_users(const HyperParams& params,
                                    std::int64_t pilot_users, int pilot_days,
                                    int horizon, SplitRng& rng) {
  params.validate();
  if (pilot_users < 0 || pilot_days < 0 || horizon < 0) {
    throw std::domain_error("sample_window_new_users: negative argument");
  }
  std::vector<SimUser> window_users;
  WindowStats stats;
  for (int t = 0; t < horizon; ++t) {
    stats.new_users +=
        urn_day_step(params, pilot_days + t, pilot_users, window_users, rng);
  }
  for (const SimUser& user : window_users) ++stats.new_by_freq[user.total];
  return stats;
}

TriggerData sample_zipf(const ZipfSimConfig& config) {
  if (!(config.tau > 0.0)) throw std::domain_error("sample_zipf: tau <= 0");
  if (config.n_users < 1) throw std::domain_error("sample_zipf: n_users < 1");
  if (config.days < 0) throw std::domain_error("sample_zipf: days < 0");
  const int width =
      std::max<int>(6, std::to_string(config.n_users).size());
  SplitRng root(config.seed);
  TriggerData::Builder builder(config.days);
  for (std::int64_t n = 1; n <= config.n_users; ++n) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(n));
    const double rate = std::pow(static_cast<double>(n), -config.tau);
    std::int64_t running_total = 0;
    std::string id;  // built lazily, most users never trigger
    for (int d = 1; d <= config.days; ++d) {
      if (rng.next_double() >= rate) continue;
      const std::int64_t count = truncated_poisson_draw(
          rng, 1.0 + static_cast<double>(running_total) / d);
      if (id.empty()) id = user_id(n, width);
      builder.add(d, id, count);
      running_total += count;
    }
  }
  return std::move(builder).build();
}

}  // namespace abh
