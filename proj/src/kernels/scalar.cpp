#include "arhmm/kernels/kernels.hpp"

#include <cmath>

namespace arhmm::kernels {

namespace {

void log_series_scalar(const double* x, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

void gamma_ar_loglik_scalar(const double* x, const double* log_x, std::size_t n,
                            std::size_t p, const double* phi, double anchor, double shape,
                            double c0, double* out) {
    for (std::size_t t = p; t < n; ++t) {
        double m = anchor;
        for (std::size_t k = 0; k < p; ++k) m += phi[k] * x[t - 1 - k];
        out[t - p] = c0 - shape * std::log(m) + (shape - 1.0) * log_x[t] - shape * x[t] / m;
    }
}

void vonmises_ar_loglik_scalar(const double* cosx, const double* sinx, std::size_t n,
                               std::size_t p, const double* phi, double anchor_c,
                               double anchor_s, double kappa, double log_norm,
                               double fallback_c, double fallback_s, double* out) {
    for (std::size_t t = p; t < n; ++t) {
        double c = anchor_c, s = anchor_s;
        for (std::size_t k = 0; k < p; ++k) {
            c += phi[k] * cosx[t - 1 - k];
            s += phi[k] * sinx[t - 1 - k];
        }
        const double r = std::sqrt(c * c + s * s);
        double cosdiff;
        if (r < 1e-12) {
            cosdiff = cosx[t] * fallback_c + sinx[t] * fallback_s;
        } else {
            cosdiff = (cosx[t] * c + sinx[t] * s) / r;
        }
        out[t - p] = kappa * cosdiff - log_norm;
    }
}

} // namespace

const Backend& scalar() {
    static const Backend backend{"scalar", log_series_scalar, gamma_ar_loglik_scalar,
                                 vonmises_ar_loglik_scalar};
    return backend;
}

} // namespace arhmm::kernels
