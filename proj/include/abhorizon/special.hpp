// Apache License, Version 2.0, refer to LICENSE.txt
//
// Special-function primitives used by every closed-form posterior in the
// library: log-gamma plumbing, the arrival-mass function psi, and the
// frequency-resolved mass rho.

#ifndef ABHORIZON_SPECIAL_HPP
#define ABHORIZON_SPECIAL_HPP

namespace abh {

/// Natural log of the gamma function. Throws std::domain_error for z <= 0.
double log_gamma(double z);

/// log B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// log of the generalized binomial coefficient C(top, k) with real top and
/// integer k >= 0. Requires top - k + 1 > 0.
double log_binom_real(double top, int k);

/// Arguments of psi: sigma in (0,1), r > 0, x >= 0 days observed,
/// y >= 0 further days.
struct PsiArgs {
  double sigma;
  double r;
  double x;
  double y;

  void validate() const;
};

/// The expected new-arrival mass accrued between day x and day x+y.
///
/// Mathematically equal to sigma * [B(r x + 1, -sigma) - B(r(x+y) + 1, -sigma)],
/// but evaluated as
///   Gamma(1-sigma) * [G(r(x+y)) - G(r x)],  G(u) = Gamma(u+1)/Gamma(u+1-sigma),
/// entirely through log_gamma, so no negative-argument beta ever appears.
/// Strictly positive for y > 0, exactly 0 for y == 0.
double psi(const PsiArgs& args);

inline double psi(double sigma, double r, double x, double y) {
  return psi(PsiArgs{sigma, r, x, y});
}

/// Coefficient convention for rho. kNegBinPmf uses the standard negative
/// binomial coefficient C(j + r*d1 - 1, j); kAsWritten uses C(j + r*d1 + 1, j).
/// The shipped default is kNegBinPmf, selected by simulation agreement
/// (see the acceptance suite); kAsWritten is kept for comparison.
enum class RhoConvention { kNegBinPmf, kAsWritten };

/// log of rho, the Levy mass of a yet-unseen user accruing total count
/// exactly j >= 1 over d1 future days after d0 observed days:
///   rho = C(top, j) * sigma * B(r (d0 + d1) + 1, j - sigma),
/// with top per the convention above.
double log_rho(int j, double sigma, double r, int d0, int d1,
               RhoConvention conv = RhoConvention::kNegBinPmf);

double rho(int j, double sigma, double r, int d0, int d1,
           RhoConvention conv = RhoConvention::kNegBinPmf);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_inc_gamma_lower(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double reg_inc_beta(double a, double b, double x);

}  // namespace abh

#endif  // ABHORIZON_SPECIAL_HPP
