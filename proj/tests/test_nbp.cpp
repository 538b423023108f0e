// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/nbp.hpp"

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "abhorizon/rng.hpp"
#include "abhorizon/simulate.hpp"
#include "support/sequential.hpp"

using abh::HyperParams;
using abh::Interval;
using abh::largest_jump_posterior;
using abh::log_marginal_likelihood;
using abh::make_forecast;
using abh::posterior_jump;
using abh::predict_new_users;
using abh::predict_new_users_freq;
using abh::predict_old_users_sum;
using abh::predict_total;
using abh::RhoConvention;
using abh::SuffStats;
using abh::TriggerData;

namespace {

SuffStats stats_with(std::int64_t users, int pilot_days) {
  SuffStats s;
  s.num_users = users;
  s.pilot_days = pilot_days;
  return s;
}

SuffStats single_user_one_day() {
  TriggerData::Builder b(1);
  b.add(1, "u1", 1);
  return compute_suffstats(std::move(b).build(), 1);
}

}  // namespace

TEST_CASE("largest jump posterior parameters") {
  // psi_0^(1) = 1 at sigma=1/2, r=1.
  const auto g0 = largest_jump_posterior(
      HyperParams{1.0, 0.5, 0.0, 1.0}, stats_with(0, 1));
  CHECK(g0.shape == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g0.rate == doctest::Approx(2.0).epsilon(1e-9));

  const auto g1 = largest_jump_posterior(HyperParams{1.0, 0.5, 2.0, 1.0},
                                         stats_with(10, 1));
  CHECK(g1.shape == doctest::Approx(13.0));
  CHECK(g1.rate == doctest::Approx(2.0).epsilon(1e-9));

  // No data: the prior tilt Gamma(c+1, beta).
  const auto prior = largest_jump_posterior(HyperParams{2.5, 0.5, 3.0, 1.0},
                                            stats_with(0, 0));
  CHECK(prior.shape == doctest::Approx(4.0));
  CHECK(prior.rate == doctest::Approx(2.5));
}

TEST_CASE("marginal likelihood pins the single-user instance") {
  const HyperParams params{1.0, 0.5, 1.0, 1.0};
  // Shipped form: exact sequential value P = 1/6
  // (P(one arrival) = 2 * 0.5 * 0.25, times P(count 1) = B(1/2, 2)/2).
  const double ll = log_marginal_likelihood(params, single_user_one_day());
  CHECK(ll == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-9));
  // The beta factor as printed evaluates to 1/30 on the same instance.
  const double printed = log_marginal_likelihood(
      params, single_user_one_day(), abh::XiConvention::kAsWritten);
  CHECK(printed == doctest::Approx(std::log(1.0 / 30.0)).epsilon(1e-9));
}

TEST_CASE("marginal likelihood equals the sequential predictive product") {
  // Up to an ordering constant that depends on the data alone: the gap
  // between the two routes must not move with the hyperparameters.
  abh::SplitRng rng(313);
  for (int trial = 0; trial < 6; ++trial) {
    const HyperParams gen{0.5 + rng.next_double(), 0.2 + 0.6 * rng.next_double(),
                          0.5 + 3.0 * rng.next_double(),
                          0.5 + 2.0 * rng.next_double()};
    const int days = 2 + static_cast<int>(rng.next_u64() % 3);
    const abh::TriggerData data =
        abh::sample_model({gen, days, 900 + static_cast<std::uint64_t>(trial)});
    const SuffStats stats = compute_suffstats(data, days);
    if (stats.num_users == 0) continue;
    double reference = 0.0;
    for (int p = 0; p < 5; ++p) {
      const HyperParams probe{0.2 + 2.0 * rng.next_double(),
                              0.1 + 0.8 * rng.next_double(),
                              0.2 + 8.0 * rng.next_double(),
                              0.3 + 5.0 * rng.next_double()};
      const double gap = abh::testing::sequential_log_prob(data, probe, days) -
                         log_marginal_likelihood(probe, stats);
      if (p == 0) {
        reference = gap;
      } else {
        CHECK(gap == doctest::Approx(reference).epsilon(1e-9));
      }
    }
    // Single-user instances carry no ordering ambiguity at all.
  }
  const SuffStats single = single_user_one_day();
  TriggerData::Builder b(1);
  b.add(1, "u1", 1);
  const TriggerData data = std::move(b).build();
  const HyperParams params{1.0, 0.5, 1.0, 1.0};
  CHECK(abh::testing::sequential_log_prob(data, params, 1) ==
        doctest::Approx(log_marginal_likelihood(params, single)).epsilon(1e-12));
}

TEST_CASE("marginal likelihood of an empty sample") {
  TriggerData::Builder b(2);
  const SuffStats s = compute_suffstats(std::move(b).build(), 2);
  const HyperParams params{1.5, 0.4, 2.0, 3.0};
  const double mass = abh::psi(params.sigma, params.r, 0.0, 2.0);
  const double expected =
      (params.c + 1.0) *
      (std::log(params.beta) - std::log(params.beta + mass));
  CHECK(log_marginal_likelihood(params, s) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("marginal likelihood decreases in m for sigma near 1") {
  const HyperParams params{1.0, 0.95, 1.0, 1.0};
  double prev = 0.0;
  for (std::int64_t m = 1; m <= 4; ++m) {
    TriggerData::Builder b(1);
    b.add(1, "u1", m);
    const double ll =
        log_marginal_likelihood(params, compute_suffstats(std::move(b).build(), 1));
    if (m > 1) CHECK(ll < prev);
    prev = ll;
  }
}

TEST_CASE("new-user predictor matches hand values") {
  const auto d = predict_new_users(HyperParams{1.0, 0.5, 0.0, 1.0},
                                   stats_with(10, 1), 1);
  CHECK(d.success_prob == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(d.mean() == doctest::Approx(11.0 / 3.0).epsilon(1e-9));

  const auto none = predict_new_users(HyperParams{1.0, 0.5, 2.0, 1.0},
                                      stats_with(10, 1), 0);
  CHECK(none.success_prob == 0.0);
  CHECK(none.mean() == 0.0);

  const auto prior = predict_new_users(HyperParams{1.0, 0.5, 0.0, 1.0},
                                       stats_with(0, 0), 1);
  CHECK(prior.success_prob == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(prior.mean() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("new-user mean closes with the additivity form") {
  abh::SplitRng rng(17);
  for (int i = 0; i < 100; ++i) {
    const HyperParams params{0.05 + 10.0 * rng.next_double(),
                             0.05 + 0.9 * rng.next_double(),
                             0.01 + 20.0 * rng.next_double(),
                             0.2 + 8.0 * rng.next_double()};
    const int d0 = 1 + static_cast<int>(rng.next_u64() % 30);
    const int d1 = 1 + static_cast<int>(rng.next_u64() % 60);
    const std::int64_t users = static_cast<std::int64_t>(rng.next_u64() % 500);
    const auto dist = predict_new_users(params, stats_with(users, d0), d1);
    const double via_p = dist.mean();
    const double direct = (static_cast<double>(users) + params.c + 1.0) *
                          abh::psi(params.sigma, params.r, d0, d1) /
                          (params.beta + abh::psi(params.sigma, params.r, 0.0, d0));
    CHECK(via_p == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("new-user mean is monotone in horizon and pilot size") {
  const HyperParams params{1.0, 0.6, 5.0, 2.0};
  double prev = -1.0;
  for (int d1 = 0; d1 <= 20; ++d1) {
    const double m = predict_new_users(params, stats_with(40, 5), d1).mean();
    CHECK(m >= prev);
    prev = m;
  }
  prev = -1.0;
  for (std::int64_t n = 0; n <= 200; n += 20) {
    const double m = predict_new_users(params, stats_with(n, 5), 7).mean();
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("frequency-resolved predictor under both conventions") {
  const HyperParams params{1.0, 0.5, 0.0, 1.0};
  const auto as_written = predict_new_users_freq(
      params, stats_with(0, 1), 1, 1, RhoConvention::kAsWritten);
  CHECK(as_written.success_prob == doctest::Approx(1.6 / 3.6).epsilon(1e-9));
  CHECK(as_written.mean() == doctest::Approx(0.8).epsilon(1e-9));

  const auto negbin = predict_new_users_freq(params, stats_with(0, 1), 1, 1,
                                             RhoConvention::kNegBinPmf);
  CHECK(negbin.success_prob ==
        doctest::Approx((8.0 / 15.0) / (2.0 + 8.0 / 15.0)).epsilon(1e-9));
  CHECK(negbin.mean() == doctest::Approx(8.0 / 30.0).epsilon(1e-9));

  // Mass vanishes with j.
  double prev = 1e9;
  for (int j = 1; j <= 40; j += 3) {
    const double m =
        predict_new_users_freq(params, stats_with(5, 3), 4, j).mean();
    CHECK(m < prev);
    prev = m;
  }
  CHECK(prev < 1e-4);
  CHECK_THROWS_AS(predict_new_users_freq(params, stats_with(5, 3), 4, 0),
                  std::domain_error);
}

TEST_CASE("posterior jump law") {
  const auto b = posterior_jump(HyperParams{1.0, 0.5, 1.0, 1.0}, 3, 2);
  CHECK(b.a == doctest::Approx(2.5));
  CHECK(b.b == doctest::Approx(3.0));
  CHECK(b.mean() == doctest::Approx(2.5 / 5.5).epsilon(1e-12));

  const auto tiny = posterior_jump(HyperParams{1.0, 0.99, 1.0, 1.0}, 1, 4);
  CHECK(tiny.a == doctest::Approx(0.01));
  CHECK(tiny.a > 0.0);

  // Larger pilots shrink the jump stochastically (b grows).
  const auto wide = posterior_jump(HyperParams{1.0, 0.5, 1.0, 1.5}, 3, 10);
  CHECK(wide.b > b.b);
  CHECK_THROWS_AS(posterior_jump(HyperParams{1.0, 0.5, 1.0, 1.0}, 0, 2),
                  std::domain_error);
}

namespace {

SuffStats two_totals_stats() {
  TriggerData::Builder b(2);
  b.add(1, "u1", 2).add(2, "u1", 1).add(1, "u2", 1);
  return compute_suffstats(std::move(b).build(), 2);
}

}  // namespace

TEST_CASE("old-user volume: closed-form mean and simulation agree") {
  // m = (3, 1), sigma = 1/2, D0 = 2, D1 = 4: mean = 2 * (2.5 + 0.5) = 6.
  const HyperParams params{1.0, 0.5, 1.0, 1.0};
  const SuffStats stats = two_totals_stats();
  REQUIRE(stats.totals == std::vector<std::int64_t>{3, 1});
  const Interval iv = predict_old_users_sum(params, stats, 4, 20000, 91);
  CHECK(iv.mean == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(iv.lo <= iv.mean);
  CHECK(iv.hi >= iv.mean);

  // Independent Monte Carlo of the compound law.
  abh::SplitRng rng(123);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (const std::int64_t m : stats.totals) {
      const double jump = abh::beta_draw(
          rng, static_cast<double>(m) - params.sigma, params.r * 2 + 1.0);
      total += static_cast<double>(abh::negbin_draw(rng, params.r * 4, jump));
    }
    sum += total;
    sum2 += total * total;
  }
  const double mc_mean = sum / n;
  const double se = std::sqrt((sum2 / n - mc_mean * mc_mean) / n);
  CHECK(std::fabs(mc_mean - iv.mean) < 3.0 * se);
}

TEST_CASE("old-user volume edge cases") {
  const HyperParams params{1.0, 0.5, 1.0, 1.0};
  const auto zero_horizon =
      predict_old_users_sum(params, two_totals_stats(), 0, 100, 1);
  CHECK(zero_horizon.mean == 0.0);
  CHECK(zero_horizon.lo == 0.0);
  CHECK(zero_horizon.hi == 0.0);

  const auto empty = predict_old_users_sum(params, stats_with(0, 2), 5, 100, 1);
  CHECK(empty.mean == 0.0);
  CHECK(empty.hi == 0.0);
}

TEST_CASE("total predictor decomposes exactly") {
  const HyperParams params{0.8, 0.45, 2.0, 1.5};
  const SuffStats stats = two_totals_stats();
  const Interval total = predict_total(params, stats, 6, 50, 512, 7);

  double freq_sum = 0.0;
  for (int j = 1; j <= 4000; ++j) {
    freq_sum += j * predict_new_users_freq(params, stats, 6, j).mean();
  }
  const double old_mean =
      predict_old_users_sum(params, stats, 6, 128, 3).mean;
  CHECK(total.mean == doctest::Approx(freq_sum + old_mean).epsilon(1e-6));
  CHECK(total.lo <= total.mean);
  CHECK(total.hi >= total.mean);

  const auto quiet = predict_total(params, stats, 0, 50, 128, 7);
  CHECK(quiet.mean == 0.0);

  // Empty pilot: only the frequency part remains.
  const Interval prior_total = predict_total(params, stats_with(0, 2), 6, 50,
                                             512, 7);
  double prior_freq = 0.0;
  for (int j = 1; j <= 4000; ++j) {
    prior_freq +=
        j * predict_new_users_freq(params, stats_with(0, 2), 6, j).mean();
  }
  CHECK(prior_total.mean == doctest::Approx(prior_freq).epsilon(1e-6));
}

TEST_CASE("forecast report holds its invariants") {
  const HyperParams params{1.0, 0.5, 3.0, 2.0};
  const SuffStats stats = two_totals_stats();
  const auto report = make_forecast(params, stats, 7, 5, 0.9, 256, 11);
  CHECK(report.horizon == 7);
  CHECK(report.new_by_freq.size() == 5);
  const auto check_interval = [](const Interval& iv) {
    CHECK(iv.lo <= iv.mean);
    CHECK(iv.mean <= iv.hi);
    CHECK(iv.lo >= 0.0);
  };
  check_interval(report.new_users);
  for (const auto& f : report.new_by_freq) check_interval(f.interval);
  REQUIRE(report.old_sum.has_value());
  REQUIRE(report.total.has_value());
  check_interval(*report.old_sum);
  check_interval(*report.total);

  // Zero horizon: everything collapses to zero.
  const auto quiet = make_forecast(params, stats, 0, 3, 0.9, 128, 11);
  CHECK(quiet.new_users.mean == 0.0);
  CHECK(quiet.total->hi == 0.0);

  // Aggregate-only statistics: re-trigger forecasts are absent.
  const SuffStats aggregate =
      abh::suffstats_from_arrivals(std::vector<std::int64_t>{1, 2}, 2);
  const auto partial = make_forecast(params, aggregate, 7, 3, 0.9, 128, 11);
  CHECK(partial.new_users.mean > 0.0);
  CHECK_FALSE(partial.old_sum.has_value());
  CHECK_FALSE(partial.total.has_value());
}
