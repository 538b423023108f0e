// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "abhorizon/rng.hpp"
#include "abhorizon/simulate.hpp"

using abh::Box;
using abh::DEConfig;
using abh::differential_evolution;
using abh::FitConfig;
using abh::fit_mle;
using abh::fit_regression;
using abh::FitResult;
using abh::HyperParams;
using abh::SuffStats;

TEST_CASE("differential evolution solves the sphere") {
  const std::vector<Box> bounds(4, Box{-5.0, 5.0});
  DEConfig config;
  config.max_iters = 800;
  config.tolerance = 1e-14;
  config.seed = 3;
  const auto result = differential_evolution(
      [](std::span<const double> x) {
        double s = 0.0;
        for (const double v : x) s += v * v;
        return s;
      },
      bounds, config);
  for (const double v : result.x) CHECK(std::fabs(v) < 1e-6);
}

TEST_CASE("differential evolution solves rosenbrock") {
  const std::vector<Box> bounds(2, Box{-2.0, 2.0});
  DEConfig config;
  config.max_iters = 1000;
  config.tolerance = 1e-16;
  config.seed = 5;
  const auto result = differential_evolution(
      [](std::span<const double> x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
      },
      bounds, config);
  CHECK(result.value < 1e-8);
}

TEST_CASE("differential evolution pins collapsed coordinates") {
  const std::vector<Box> bounds{{-1.0, 1.0}, {2.5, 2.5}};
  DEConfig config;
  config.seed = 7;
  const auto result = differential_evolution(
      [](std::span<const double> x) { return x[0] * x[0] + x[1]; }, bounds,
      config);
  CHECK(result.x[1] == 2.5);
}

TEST_CASE("differential evolution rejects an all-infinite start") {
  const std::vector<Box> bounds{{0.0, 1.0}};
  DEConfig config;
  config.seed = 1;
  CHECK_THROWS_AS(
      differential_evolution(
          [](std::span<const double>) {
            return std::numeric_limits<double>::quiet_NaN();
          },
          bounds, config),
      std::runtime_error);
}

TEST_CASE("mle fit dominates the generating parameters") {
  const HyperParams truth{2.0, 0.5, 30.0, 5.0};
  const abh::TriggerData data = abh::sample_model({truth, 365, 12345});
  const SuffStats stats = compute_suffstats(data, 365);
  FitConfig config;
  config.seed = 9;
  const FitResult fit = fit_mle(stats, config);
  const double at_truth = abh::log_marginal_likelihood(truth, stats);
  CHECK(fit.objective >= at_truth - 1e-6);
  // The reported objective matches a re-evaluation at the fitted point.
  CHECK(fit.objective ==
        doctest::Approx(abh::log_marginal_likelihood(fit.params, stats))
            .epsilon(1e-12));
}

TEST_CASE("mle fit is deterministic and respects bounds") {
  const abh::TriggerData data =
      abh::sample_model({HyperParams{1.0, 0.5, 5.0, 2.0}, 30, 7});
  const SuffStats stats = compute_suffstats(data, 30);
  FitConfig config;
  config.seed = 21;
  config.de_max_iters = 60;
  const FitResult a = fit_mle(stats, config);
  const FitResult b = fit_mle(stats, config);
  CHECK(a.params.beta == b.params.beta);
  CHECK(a.params.sigma == b.params.sigma);
  CHECK(a.params.c == b.params.c);
  CHECK(a.params.r == b.params.r);
  CHECK(a.params.beta >= config.bounds[0].lo);
  CHECK(a.params.beta <= config.bounds[0].hi);
  CHECK(a.params.sigma >= config.bounds[1].lo);
  CHECK(a.params.sigma <= config.bounds[1].hi);

  // Collapsed box returns the pinned point.
  FitConfig pinned = config;
  pinned.bounds = {Box{2.0, 2.0}, Box{0.5, 0.5}, Box{30.0, 30.0},
                   Box{5.0, 5.0}};
  const FitResult fixed = fit_mle(stats, pinned);
  CHECK(fixed.params.beta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fixed.params.sigma == 0.5);
  CHECK(fixed.params.c == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(fixed.params.r == 5.0);
}

TEST_CASE("mle fit refuses an empty pilot") {
  SuffStats empty;
  empty.pilot_days = 3;
  CHECK_THROWS_AS(fit_mle(empty, FitConfig{}), std::invalid_argument);
}

TEST_CASE("regression fit reproduces a curve generated by the predictor") {
  const HyperParams truth{1.0, 0.5, 2.0, 1.0};
  const int pilot = 12;
  std::vector<std::int64_t> arrivals(pilot);
  arrivals[0] = 3;
  SuffStats anchor;
  anchor.num_users = 3;
  anchor.pilot_days = 1;
  double rounding = 0.0;
  for (int d = 1; d < pilot; ++d) {
    const double mean = abh::predict_new_users(truth, anchor, d).mean();
    arrivals[d] = 3 + static_cast<std::int64_t>(std::llround(mean));
    const double err = mean - std::llround(mean);
    rounding += err * err;
  }
  FitConfig config;
  config.seed = 31;
  config.method = abh::FitMethod::kRegression;
  const FitResult fit = fit_regression(arrivals, config);
  // The fitted objective cannot sit far above the rounding floor, which is
  // what the generating parameters themselves achieve.
  CHECK(fit.objective <= rounding + 0.5);
  CHECK_FALSE(fit.degenerate);
}

TEST_CASE("regression fit dominance over random box points") {
  std::vector<std::int64_t> arrivals{4, 6, 9, 11, 12, 14, 15, 15, 16, 18};
  FitConfig config;
  config.seed = 17;
  const FitResult fit = fit_regression(arrivals, config);

  const auto objective = [&](const HyperParams& params) {
    double sse = 0.0;
    const double seen = abh::psi(params.sigma, params.r, 0.0, 1.0);
    for (int d = 1; d + 1 <= static_cast<int>(arrivals.size()); ++d) {
      const double gained = abh::psi(params.sigma, params.r, 1.0, d);
      const double predicted = (static_cast<double>(arrivals[0]) + params.c +
                                1.0) *
                               gained / (params.beta + seen);
      const double observed =
          static_cast<double>(arrivals[d] - arrivals[0]);
      sse += (predicted - observed) * (predicted - observed);
    }
    return sse;
  };
  CHECK(fit.objective == doctest::Approx(objective(fit.params)).epsilon(1e-9));
  abh::SplitRng rng(55);
  for (int i = 0; i < 100; ++i) {
    const HyperParams random{
        std::exp(std::log(1e-3) + rng.next_double() * std::log(1e6)),
        0.01 + 0.98 * rng.next_double(),
        std::exp(std::log(1e-3) + rng.next_double() * std::log(1e6)),
        0.1 + 99.9 * rng.next_double()};
    CHECK(fit.objective <= objective(random) + 1e-9);
  }
}

TEST_CASE("regression fit flags degenerate and misconfigured inputs") {
  FitConfig config;
  config.method = abh::FitMethod::kRegression;
  const std::vector<std::int64_t> flat{5, 5, 5, 5};
  const FitResult fit = fit_regression(flat, config);
  CHECK(fit.degenerate);

  config.regression_d0 = 4;
  CHECK_THROWS_AS(fit_regression(flat, config), std::invalid_argument);
  config.regression_d0 = 1;
  CHECK_THROWS_AS(fit_regression(std::vector<std::int64_t>{3}, config),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_regression(std::vector<std::int64_t>{3, 2, 1}, config),
                  std::invalid_argument);
}
