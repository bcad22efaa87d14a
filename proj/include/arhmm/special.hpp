#pragma once

#include <functional>

namespace arhmm {

// log I0(kappa), the modified Bessel function of order zero. Power series for
// kappa < 15, asymptotic expansion truncated at its smallest term otherwise;
// both branches hold relative accuracy around 1e-13 across the split.
double log_bessel_i0(double kappa);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0. Series expansion
// for x < a + 1, continued fraction (modified Lentz) otherwise.
double regularized_gamma_p(double a, double x);

// Standard normal quantile. Rational initial guess refined with one Halley
// step against the erfc-based CDF; p must lie in (0, 1).
double normal_quantile(double p);

// Standard normal CDF via erfc.
double normal_cdf(double z);

// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

} // namespace arhmm
