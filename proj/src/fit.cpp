// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "abhorizon/rng.hpp"

namespace abh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded(const std::function<double(std::span<const double>)>& objective,
               std::span<const double> x) {
  const double value = objective(x);
  return std::isfinite(value) ? value : kInf;
}

}  // namespace

DEResult differential_evolution(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const Box> bounds, const DEConfig& config) {
  const int dim = static_cast<int>(bounds.size());
  if (dim == 0) throw std::invalid_argument("differential_evolution: no bounds");
  for (const Box& b : bounds) {
    if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw std::invalid_argument("differential_evolution: bad box");
    }
  }
  if (!(config.tolerance > 0.0)) {
    throw std::invalid_argument("differential_evolution: tolerance <= 0");
  }
  const int pop_size = std::max(config.population, 15 * dim);
  if (pop_size < 4) {
    throw std::invalid_argument("differential_evolution: population < 4");
  }

  SplitRng rng(config.seed);
  const auto uniform_in = [&](const Box& b) {
    return b.lo + (b.hi - b.lo) * rng.next_double();
  };

  std::vector<std::vector<double>> pop(pop_size, std::vector<double>(dim));
  std::vector<double> values(pop_size);
  for (int i = 0; i < pop_size; ++i) {
    for (int j = 0; j < dim; ++j) pop[i][j] = uniform_in(bounds[j]);
    values[i] = guarded(objective, pop[i]);
  }
  int best = static_cast<int>(
      std::min_element(values.begin(), values.end()) - values.begin());
  if (!std::isfinite(values[best])) {
    throw std::runtime_error(
        "differential_evolution: objective not finite anywhere in the "
        "initial population");
  }

  DEResult result;
  result.converged = false;
  int iter = 0;
  std::vector<double> trial(dim);
  std::vector<std::vector<double>> trials(pop_size, std::vector<double>(dim));
  for (; iter < config.max_iters; ++iter) {
    // Convergence: spread of finite objective values relative to their mean.
    double sum = 0.0, sum2 = 0.0;
    int finite = 0;
    for (const double v : values) {
      if (std::isfinite(v)) {
        sum += v;
        sum2 += v * v;
        ++finite;
      }
    }
    if (finite == pop_size) {
      const double mean = sum / pop_size;
      const double var = std::max(0.0, sum2 / pop_size - mean * mean);
      // Absolute spread: relative-to-mean criteria misbehave when the
      // objective is a large negative log likelihood.
      if (std::sqrt(var) <= config.tolerance) {
        result.converged = true;
        break;
      }
    }

    const double f = 0.5 + 0.5 * rng.next_double();  // dither per generation
    // All trial vectors are built against the current generation, then
    // selection is applied, so evaluation order cannot change the trajectory.
    for (int i = 0; i < pop_size; ++i) {
      int r1 = static_cast<int>(rng.next_u64() % pop_size);
      while (r1 == i) r1 = static_cast<int>(rng.next_u64() % pop_size);
      int r2 = static_cast<int>(rng.next_u64() % pop_size);
      while (r2 == i || r2 == r1) r2 = static_cast<int>(rng.next_u64() % pop_size);
      const int forced = static_cast<int>(rng.next_u64() % dim);
      for (int j = 0; j < dim; ++j) {
        const bool cross = rng.next_double() < 0.7 || j == forced;
        double v = cross ? pop[best][j] + f * (pop[r1][j] - pop[r2][j])
                         : pop[i][j];
        trials[i][j] = std::clamp(v, bounds[j].lo, bounds[j].hi);
      }
    }
    for (int i = 0; i < pop_size; ++i) {
      const double trial_value = guarded(objective, trials[i]);
      if (trial_value <= values[i]) {
        pop[i] = trials[i];
        values[i] = trial_value;
        if (trial_value < values[best]) best = i;
      }
    }
  }

  result.x = pop[best];
  result.value = values[best];
  result.iterations = iter;
  return result;
}

void FitConfig::validate() const {
  for (const Box& b : bounds) {
    if (!(b.lo <= b.hi)) throw std::invalid_argument("FitConfig: bad box");
  }
  if (!(bounds[0].lo > 0.0) || !(bounds[2].lo > 0.0)) {
    throw std::invalid_argument("FitConfig: beta and c boxes must be positive");
  }
  if (!(bounds[1].lo > 0.0 && bounds[1].hi < 1.0)) {
    throw std::invalid_argument("FitConfig: sigma box must sit inside (0, 1)");
  }
  if (!(bounds[3].lo > 0.0)) {
    throw std::invalid_argument("FitConfig: r box must be positive");
  }
  if (!(de_tolerance > 0.0)) {
    throw std::invalid_argument("FitConfig: tolerance must be positive");
  }
  if (de_population != 0 && de_population < 4) {
    throw std::invalid_argument("FitConfig: population must be >= 4");
  }
  if (regression_d0 < 1) {
    throw std::invalid_argument("FitConfig: regression_d0 must be >= 1");
  }
}

namespace {

// Search coordinates: (log beta, sigma, log c, r).
std::array<Box, 4> search_boxes(const FitConfig& config) {
  return {Box{std::log(config.bounds[0].lo), std::log(config.bounds[0].hi)},
          config.bounds[1],
          Box{std::log(config.bounds[2].lo), std::log(config.bounds[2].hi)},
          config.bounds[3]};
}

HyperParams params_from_search(std::span<const double> u) {
  return HyperParams{std::exp(u[0]), u[1], std::exp(u[2]), u[3]};
}

DEConfig de_config(const FitConfig& config) {
  DEConfig de;
  de.population = config.de_population;
  de.max_iters = config.de_max_iters;
  de.tolerance = config.de_tolerance;
  de.seed = config.seed;
  return de;
}

}  // namespace

FitResult fit_mle(const SuffStats& stats, const FitConfig& config) {
  config.validate();
  if (stats.num_users == 0) {
    throw std::invalid_argument(
        "fit_mle: empty pilot, likelihood carries no information");
  }
  const auto boxes = search_boxes(config);
  const auto objective = [&](std::span<const double> u) {
    return -log_marginal_likelihood(params_from_search(u), stats);
  };
  const DEResult de = differential_evolution(objective, boxes,
                                             de_config(config));
  FitResult result;
  result.params = params_from_search(de.x);
  result.objective = -de.value;
  result.converged = de.converged;
  result.iterations = de.iterations;
  return result;
}

FitResult fit_regression(std::span<const std::int64_t> arrivals,
                         const FitConfig& config) {
  config.validate();
  const int d0 = config.regression_d0;
  const int pilot = static_cast<int>(arrivals.size());
  if (pilot < 2) {
    throw std::invalid_argument("fit_regression: need at least two days");
  }
  if (d0 >= pilot) {
    throw std::invalid_argument(
        "fit_regression: regression_d0 leaves an empty objective");
  }
  for (int d = 1; d < pilot; ++d) {
    if (arrivals[d] < arrivals[d - 1]) {
      throw std::invalid_argument("fit_regression: arrivals must be "
                                  "nondecreasing");
    }
  }
  const bool flat = arrivals[pilot - 1] == arrivals[d0 - 1];
  const double anchor = static_cast<double>(arrivals[d0 - 1]);

  const auto boxes = search_boxes(config);
  const auto objective = [&](std::span<const double> u) {
    const HyperParams params = params_from_search(u);
    double sse = 0.0;
    const double seen = psi(params.sigma, params.r, 0.0, d0);
    for (int d = 1; d + d0 <= pilot; ++d) {
      const double gained = psi(params.sigma, params.r, d0, d);
      const double predicted =
          (anchor + params.c + 1.0) * gained / (params.beta + seen);
      const double observed =
          static_cast<double>(arrivals[d0 + d - 1] - arrivals[d0 - 1]);
      const double err = predicted - observed;
      sse += err * err;
    }
    return sse;
  };
  const DEResult de = differential_evolution(objective, boxes,
                                             de_config(config));
  FitResult result;
  result.params = params_from_search(de.x);
  result.objective = de.value;
  result.converged = de.converged;
  result.degenerate = flat;
  result.iterations = de.iterations;
  return result;
}

}  // namespace abh
