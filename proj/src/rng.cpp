// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace abh {

double normal_draw(SplitRng& rng) {
  // Marsaglia polar; the second variate is discarded to keep the stream
  // stateless between calls.
  while (true) {
    const double u = 2.0 * rng.next_double() - 1.0;
    const double v = 2.0 * rng.next_double() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double gamma_draw(SplitRng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("gamma_draw: shape and rate must be positive");
  }
  // Marsaglia-Tsang squeeze; shapes below 1 boosted through Gamma(shape+1).
  double boost = 1.0;
  double k = shape;
  if (k < 1.0) {
    boost = std::pow(rng.next_open_double(), 1.0 / k);
    k += 1.0;
  }
  const double d = k - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal_draw(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_open_double();
    if (u < 1.0 - 0.0331 * x * x * x * x ||
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return boost * d * v / rate;
    }
  }
}

double beta_draw(SplitRng& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("beta_draw: parameters must be positive");
  }
  while (true) {
    const double x = gamma_draw(rng, a, 1.0);
    const double y = gamma_draw(rng, b, 1.0);
    if (x + y > 0.0) return x / (x + y);
    // Both underflowed (only possible for very small shapes); redraw.
  }
}

namespace {

// Hormann's PTRS transformed rejection, exact for mean >= 10.
std::int64_t poisson_ptrs(SplitRng& rng, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_open_double();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

}  // namespace

std::int64_t poisson_draw(SplitRng& rng, double mean) {
  if (!(mean >= 0.0)) {
    throw std::domain_error("poisson_draw: mean must be nonnegative");
  }
  if (mean == 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(rng, mean);
  // Knuth multiplication for small means.
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double prod = rng.next_open_double();
  while (prod > limit) {
    prod *= rng.next_open_double();
    ++k;
  }
  return k;
}

std::int64_t negbin_draw(SplitRng& rng, double failures, double p) {
  if (!(failures > 0.0)) {
    throw std::domain_error("negbin_draw: failures must be positive");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::domain_error("negbin_draw: p must lie in [0, 1)");
  }
  if (p == 0.0) return 0;
  const double lambda = gamma_draw(rng, failures, (1.0 - p) / p);
  return poisson_draw(rng, lambda);
}

namespace {

// Shared inverse-CDF walk over {1, 2, ...} given log pmf(1) and the
// multiplicative term recurrence, conditioned on k >= 1.
template <typename StepRatio>
std::int64_t truncated_walk(SplitRng& rng, double p0, double log_term1,
                            StepRatio&& ratio) {
  // U uniform on (P(0), 1), then walk the CDF from k = 1.
  const double u = p0 + (1.0 - p0) * rng.next_open_double();
  double log_term = log_term1;
  double cum = p0 + std::exp(log_term);
  std::int64_t k = 1;
  while (cum < u && k < (1LL << 40)) {
    log_term += ratio(k);
    cum += std::exp(log_term);
    ++k;
  }
  return k;
}

}  // namespace

std::int64_t truncated_negbin_draw(SplitRng& rng, double failures, double p) {
  if (!(failures > 0.0) || !(p > 0.0 && p < 1.0)) {
    throw std::domain_error("truncated_negbin_draw: invalid parameters");
  }
  const double log_p0 = failures * std::log1p(-p);
  const double accept = -std::expm1(log_p0);  // P(X >= 1)
  if (accept >= 0.1) {
    while (true) {
      const std::int64_t x = negbin_draw(rng, failures, p);
      if (x >= 1) return x;
    }
  }
  const double p0 = std::exp(log_p0);
  const double log_term1 = log_p0 + std::log(p) + std::log(failures);
  return truncated_walk(rng, p0, log_term1, [&](std::int64_t k) {
    return std::log(p) + std::log(static_cast<double>(k) + failures) -
           std::log(static_cast<double>(k) + 1.0);
  });
}

std::int64_t truncated_poisson_draw(SplitRng& rng, double mean) {
  if (!(mean >= 0.0)) {
    throw std::domain_error("truncated_poisson_draw: mean must be >= 0");
  }
  if (mean == 0.0) return 1;  // conditioning limit
  const double accept = -std::expm1(-mean);  // P(X >= 1)
  if (accept >= 0.1) {
    while (true) {
      const std::int64_t x = poisson_draw(rng, mean);
      if (x >= 1) return x;
    }
  }
  const double p0 = std::exp(-mean);
  const double log_term1 = -mean + std::log(mean);
  return truncated_walk(rng, p0, log_term1, [&](std::int64_t k) {
    return std::log(mean) - std::log(static_cast<double>(k) + 1.0);
  });
}

std::size_t discrete_pmf_draw(SplitRng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) {
      throw std::domain_error("discrete_pmf_draw: negative weight");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw std::domain_error("discrete_pmf_draw: weights sum to zero");
  }
  const double u = rng.next_double() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  return weights.size() - 1;
}

}  // namespace abh
