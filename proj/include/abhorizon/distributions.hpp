// Apache License, Version 2.0, refer to LICENSE.txt
//
// Parametric posterior laws returned by the predictors. Plain value types:
// parameters plus mean/variance/quantile access.

#ifndef ABHORIZON_DISTRIBUTIONS_HPP
#define ABHORIZON_DISTRIBUTIONS_HPP

#include <cstdint>

namespace abh {

/// Negative binomial with real "failures" parameter and success probability
/// p in [0, 1). Mass at k: C(k + failures - 1, k) p^k (1-p)^failures.
struct NegBinDist {
  double failures;
  double success_prob;

  double mean() const;
  double variance() const;
  double log_pmf(std::int64_t k) const;
  double pmf(std::int64_t k) const;
  double cdf(std::int64_t k) const;
  /// Smallest k with CDF(k) >= q.
  std::int64_t quantile(double q) const;

  void validate() const;
};

struct BetaDist {
  double a;
  double b;

  double mean() const { return a / (a + b); }
  double variance() const;
  double cdf(double x) const;
  double quantile(double q) const;

  void validate() const;
};

/// Gamma in shape/rate parametrization.
struct GammaDist {
  double shape;
  double rate;

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
  double cdf(double x) const;
  double quantile(double q) const;

  void validate() const;
};

struct IntInterval {
  std::int64_t lo;
  std::int64_t hi;
};

/// Central credible interval: the (alpha/2, 1-alpha/2) quantile pair with
/// alpha = 1 - level, found by CDF accumulation from log-space mass terms.
IntInterval negbin_interval(const NegBinDist& dist, double level);

}  // namespace abh

#endif  // ABHORIZON_DISTRIBUTIONS_HPP
