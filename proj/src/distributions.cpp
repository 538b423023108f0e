// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "abhorizon/special.hpp"

namespace abh {

void NegBinDist::validate() const {
  if (!(failures > 0.0)) {
    throw std::domain_error("NegBinDist: failures must be positive");
  }
  if (!(success_prob >= 0.0 && success_prob < 1.0)) {
    throw std::domain_error("NegBinDist: success_prob must lie in [0, 1)");
  }
}

double NegBinDist::mean() const {
  return failures * success_prob / (1.0 - success_prob);
}

double NegBinDist::variance() const {
  const double q = 1.0 - success_prob;
  return failures * success_prob / (q * q);
}

double NegBinDist::log_pmf(std::int64_t k) const {
  validate();
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (success_prob == 0.0) {
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double kd = static_cast<double>(k);
  return std::lgamma(kd + failures) - std::lgamma(kd + 1.0) -
         std::lgamma(failures) + kd * std::log(success_prob) +
         failures * std::log1p(-success_prob);
}

double NegBinDist::pmf(std::int64_t k) const { return std::exp(log_pmf(k)); }

double NegBinDist::cdf(std::int64_t k) const {
  validate();
  if (k < 0) return 0.0;
  if (success_prob == 0.0) return 1.0;
  // CDF(k) = I_{1-p}(failures, k+1).
  return reg_inc_beta(failures, static_cast<double>(k) + 1.0,
                      1.0 - success_prob);
}

std::int64_t NegBinDist::quantile(double q) const {
  validate();
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("NegBinDist::quantile: q must lie in [0, 1]");
  }
  if (success_prob == 0.0 || q == 0.0) return 0;
  // Walk the mass function; terms kept in log space until accumulation.
  double log_term = failures * std::log1p(-success_prob);
  double cum = std::exp(log_term);
  std::int64_t k = 0;
  const double lp = std::log(success_prob);
  while (cum < q) {
    log_term += lp + std::log(static_cast<double>(k) + failures) -
                std::log(static_cast<double>(k) + 1.0);
    cum += std::exp(log_term);
    ++k;
    if (k > (1LL << 40)) {
      throw std::runtime_error("NegBinDist::quantile: accumulation diverged");
    }
  }
  return k;
}

IntInterval negbin_interval(const NegBinDist& dist, double level) {
  dist.validate();
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("negbin_interval: level must lie in (0, 1)");
  }
  if (dist.success_prob == 0.0) return {0, 0};
  const double alpha = 1.0 - level;
  // Single forward pass for both targets.
  double log_term = dist.failures * std::log1p(-dist.success_prob);
  double cum = std::exp(log_term);
  const double lp = std::log(dist.success_prob);
  std::int64_t k = 0;
  std::int64_t lo = -1;
  if (cum >= alpha / 2.0) lo = 0;
  while (cum < 1.0 - alpha / 2.0) {
    log_term += lp + std::log(static_cast<double>(k) + dist.failures) -
                std::log(static_cast<double>(k) + 1.0);
    cum += std::exp(log_term);
    ++k;
    if (lo < 0 && cum >= alpha / 2.0) lo = k;
    if (k > (1LL << 40)) {
      throw std::runtime_error("negbin_interval: accumulation diverged");
    }
  }
  return {lo, k};
}

void BetaDist::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("BetaDist: parameters must be positive");
  }
}

double BetaDist::variance() const {
  const double s = a + b;
  return a * b / (s * s * (s + 1.0));
}

double BetaDist::cdf(double x) const {
  validate();
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return reg_inc_beta(a, b, x);
}

double BetaDist::quantile(double q) const {
  validate();
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("BetaDist::quantile: q must lie in [0, 1]");
  }
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void GammaDist::validate() const {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("GammaDist: parameters must be positive");
  }
}

double GammaDist::cdf(double x) const {
  validate();
  if (x <= 0.0) return 0.0;
  return reg_inc_gamma_lower(shape, rate * x);
}

double GammaDist::quantile(double q) const {
  validate();
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::domain_error("GammaDist::quantile: q must lie in [0, 1)");
  }
  if (q == 0.0) return 0.0;
  double hi = mean() + 10.0 * std::sqrt(variance());
  while (cdf(hi) < q) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace abh
