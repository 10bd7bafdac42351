#pragma once

#include <cmath>

namespace pnr {

/// ln |Gamma(x)|. Thread-safe: the libc lgamma writes the sign to a global,
/// which is a data race when sampling on several threads; lgamma_r is not.
inline double log_gamma(double x) {
#ifdef __GLIBC__
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

/// ln(x!) = ln Gamma(x+1) for x >= 0 (continuous extension).
inline double log_factorial(double x) { return log_gamma(x + 1.0); }

/// ln C(n, k) through log-gamma; valid for continuous n >= k >= 0.
inline double log_binomial(double n, double k) {
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

/// Stirling series remainder ln Gamma(x+1) - [(x+1/2) ln x - x + ln(2 pi)/2],
/// for x > 0. All magnitudes are O(1), which is what keeps the saddle-point
/// pmf below relative errors of ~1e-14 even at 10^6 trials.
double stirling_error(double x);

/// Binomial deviance bd0(x, np) = x ln(x/np) + np - x for x >= 0, np > 0,
/// evaluated by series when x is close to np to avoid the log's cancellation.
double binomial_deviance(double x, double np);

/// ln Bin(n | m, p) for an interior point 0 < n < m, 0 < p < 1 (m, n may be
/// non-integral: the factorials are read through the gamma function). Uses
/// the saddle-point decomposition
///   -stirling terms - deviance - ln(2 pi n (m-n)/m)/2,
/// whose summands stay O(1) wherever the pmf has visible mass, instead of
/// differencing large log-gamma values.
double log_binomial_pmf(double n, double m, double p);

/// Digamma function psi(x) = d/dx ln Gamma(x), for x > 0.
double digamma(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Chi-square CDF with dof degrees of freedom.
double chi_squared_cdf(double x, double dof);

/// Chi-square quantile for 2 degrees of freedom; closed form -2 ln(1 - c).
double chi_squared_quantile_2dof(double coverage);

}  // namespace pnr
