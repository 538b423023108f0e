// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace abh {

double log_gamma(double z) {
  if (!(z > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive, got " +
                            std::to_string(z));
  }
  return std::lgamma(z);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("log_beta: arguments must be positive");
  }
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_binom_real(double top, int k) {
  if (k < 0) throw std::domain_error("log_binom_real: k must be >= 0");
  if (!(top - k + 1.0 > 0.0)) {
    throw std::domain_error("log_binom_real: requires top - k + 1 > 0");
  }
  return std::lgamma(top + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(top - k + 1.0);
}

void PsiArgs::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::domain_error("psi: sigma must lie in (0, 1)");
  }
  if (!(r > 0.0)) throw std::domain_error("psi: r must be positive");
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::domain_error("psi: x and y must be nonnegative");
  }
}

double psi(const PsiArgs& args) {
  args.validate();
  if (args.y == 0.0) return 0.0;
  // ln G(u) with G(u) = Gamma(u+1) / Gamma(u+1-sigma), increasing in u.
  const auto log_g = [&](double u) {
    return std::lgamma(u + 1.0) - std::lgamma(u + 1.0 - args.sigma);
  };
  const double lg0 = log_g(args.r * args.x);
  const double lg1 = log_g(args.r * (args.x + args.y));
  // Gamma(1-sigma) * G0 * (G1/G0 - 1); expm1 keeps small increments sharp.
  return std::exp(std::lgamma(1.0 - args.sigma) + lg0) * std::expm1(lg1 - lg0);
}

double log_rho(int j, double sigma, double r, int d0, int d1,
               RhoConvention conv) {
  if (j < 1) throw std::domain_error("rho: j must be >= 1");
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::domain_error("rho: sigma must lie in (0, 1)");
  }
  if (!(r > 0.0)) throw std::domain_error("rho: r must be positive");
  if (d0 < 0) throw std::domain_error("rho: d0 must be >= 0");
  if (d1 < 1) throw std::domain_error("rho: d1 must be >= 1");
  const double top = conv == RhoConvention::kAsWritten ? j + r * d1 + 1.0
                                                       : j + r * d1 - 1.0;
  return log_binom_real(top, j) + std::log(sigma) +
         log_beta(r * (d0 + d1) + 1.0, j - sigma);
}

double rho(int j, double sigma, double r, int d0, int d1, RhoConvention conv) {
  return std::exp(log_rho(j, sigma, r, d0, d1, conv));
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

// Lower incomplete gamma by series, valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the incomplete beta (Lentz).
double betacf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double reg_inc_gamma_lower(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("reg_inc_gamma_lower: a must be > 0");
  if (x < 0.0) throw std::domain_error("reg_inc_gamma_lower: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("reg_inc_beta: a and b must be > 0");
  }
  if (x < 0.0 || x > 1.0) {
    throw std::domain_error("reg_inc_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) -
                                log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   betacf(b, a, 1.0 - x) / b;
}

}  // namespace abh
