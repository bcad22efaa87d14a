#include "arhmm/dists.hpp"

#include "arhmm/core.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/special.hpp"

#include <cmath>

namespace arhmm {

namespace {

void check(const GammaMeanSd& d) {
    if (!(d.mean > 0.0) || !std::isfinite(d.mean) || !(d.sd > 0.0) || !std::isfinite(d.sd)) {
        throw DomainError("gamma: mean and sd must be positive and finite");
    }
}

void check(const VonMises& d) {
    if (!(d.kappa >= 0.0) || !std::isfinite(d.kappa)) {
        throw DomainError("von Mises: kappa must be finite and >= 0");
    }
}

} // namespace

double gamma_logpdf(double x, const GammaMeanSd& d) {
    check(d);
    if (!(x > 0.0)) throw DomainError("gamma_logpdf: x must be > 0");
    const double shape = (d.mean / d.sd) * (d.mean / d.sd);
    const double rate = d.mean / (d.sd * d.sd);
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
           rate * x;
}

double gamma_cdf(double x, const GammaMeanSd& d) {
    check(d);
    if (std::isnan(x)) throw DomainError("gamma_cdf: x is NaN");
    if (x <= 0.0) return 0.0;
    const double shape = (d.mean / d.sd) * (d.mean / d.sd);
    const double rate = d.mean / (d.sd * d.sd);
    return regularized_gamma_p(shape, rate * x);
}

double vonmises_logpdf(double x, const VonMises& d) {
    check(d);
    return d.kappa * std::cos(x - d.mu) - std::log(two_pi) - log_bessel_i0(d.kappa);
}

double vonmises_cdf(double x, const VonMises& d) {
    check(d);
    x = wrap_angle(x);
    double v = adaptive_simpson([&](double t) { return std::exp(vonmises_logpdf(t, d)); },
                                -pi, x, 1e-10);
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return v;
}

double ar_step_mean(std::span<const double> history, std::span<const double> phi,
                    double mu_steady) {
    if (history.size() != phi.size()) {
        throw ArgumentError("ar_step_mean: history and phi lengths differ");
    }
    double acc = 0.0, phi_sum = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        acc += phi[k] * history[k];
        phi_sum += phi[k];
    }
    return acc + (1.0 - phi_sum) * mu_steady;
}

double ar_turn_mean(std::span<const double> history, std::span<const double> phi,
                    double mu_steady) {
    if (history.size() != phi.size()) {
        throw ArgumentError("ar_turn_mean: history and phi lengths differ");
    }
    double c = 0.0, s = 0.0, phi_sum = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        c += phi[k] * std::cos(history[k]);
        s += phi[k] * std::sin(history[k]);
        phi_sum += phi[k];
    }
    c += (1.0 - phi_sum) * std::cos(mu_steady);
    s += (1.0 - phi_sum) * std::sin(mu_steady);
    if (std::sqrt(c * c + s * s) < 1e-12) return mu_steady; // Arg(0) undefined
    return std::atan2(s, c);
}

} // namespace arhmm
