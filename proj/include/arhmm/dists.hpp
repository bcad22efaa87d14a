#pragma once

#include <span>

namespace arhmm {

// Gamma distribution in mean/SD parameterization. The induced conventional
// parameters are shape = (mean/sd)^2 and rate = mean/sd^2.
struct GammaMeanSd {
    double mean = 1.0;
    double sd = 1.0;
};

// Von Mises distribution with mean direction mu in (-pi, pi] and
// concentration kappa >= 0; kappa = 0 is the circular uniform.
struct VonMises {
    double mu = 0.0;
    double kappa = 0.0;
};

double gamma_logpdf(double x, const GammaMeanSd& d);

// Regularized lower incomplete gamma at (shape, rate * x); 0 for x <= 0.
double gamma_cdf(double x, const GammaMeanSd& d);

double vonmises_logpdf(double x, const VonMises& d);

// Integral of the density over (-pi, x], by adaptive quadrature with absolute
// tolerance 1e-10.
double vonmises_cdf(double x, const VonMises& d);

// Autoregressive mean for the step variable:
//   sum_k phi[k] * history[k] + (1 - sum_k phi[k]) * mu_steady
// history is ordered most recent first (history[k] = x_{t-1-k}), matching the
// lag indexing of phi. Sizes must agree.
double ar_step_mean(std::span<const double> history, std::span<const double> phi,
                    double mu_steady);

// Autoregressive mean for the turn variable: the argument of the convex
// combination of the history angles and the steady-state angle mapped onto
// the unit circle. Falls back to mu_steady when the resultant vector has
// modulus below 1e-12.
double ar_turn_mean(std::span<const double> history, std::span<const double> phi,
                    double mu_steady);

} // namespace arhmm
