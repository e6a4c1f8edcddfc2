#pragma once

namespace risklab {

inline constexpr double kPi = 3.14159265358979323846;

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, Phi(x) = erfc(-x/sqrt 2)/2.
double normal_cdf(double x);

/// log Phi(x). Uses the asymptotic tail series below x = -8 so the result
/// stays finite far beyond the underflow point of Phi itself.
double log_normal_cdf(double x);

/// Inverse of the standard normal CDF on (0,1); +-inf at the endpoints.
/// Rational starting point refined by Newton steps to ~1e-15 absolute.
double normal_quantile(double p);

/// log B(a, b).
double log_beta(double a, double b);

}  // namespace risklab
