#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace arhmm::kernels {

// Hot inner loops of the density evaluation, provided as a scalar reference
// implementation plus SIMD variants selected once at startup. All variants
// share one contract and are equivalence-tested against the scalar kernels.
//
// Index convention: series arrays are 0-based over t = 0..n-1; an AR kernel
// with degree p writes out[t - p] for t in [p, n), reading the lag window
// x[t-1-k] for k = 0..p-1.
struct Backend {
    const char* name;

    // out[i] = log(x[i])
    void (*log_series)(const double* x, std::size_t n, double* out);

    // Gamma log-density along an AR-driven mean, one state at a time:
    //   m_t   = anchor + sum_k phi[k] * x[t-1-k]        (anchor = (1-sum phi)*mu)
    //   out[t-p] = c0 - shape*log(m_t) + (shape-1)*log_x[t] - shape*x[t]/m_t
    // with c0 = shape*log(shape) - lgamma(shape). Requires m_t > 0, which the
    // parameter constraints guarantee for positive data.
    void (*gamma_ar_loglik)(const double* x, const double* log_x, std::size_t n,
                            std::size_t p, const double* phi, double anchor, double shape,
                            double c0, double* out);

    // Von Mises log-density along the circular AR mean. cosx/sinx are the
    // precomputed cos/sin of the data. The resultant
    //   C_t = anchor_c + sum_k phi[k]*cosx[t-1-k],  S_t analogous
    // has the AR mean as its argument; the density needs only
    //   cos(x_t - mu_t) = (cosx[t]*C_t + sinx[t]*S_t) / r_t,  r_t = |(C_t,S_t)|.
    // When r_t < 1e-12 the mean falls back to the steady-state angle, i.e.
    //   cos(x_t - mu) = cosx[t]*fallback_c + sinx[t]*fallback_s.
    //   out[t-p] = kappa * cos(x_t - mu_t) - log_norm
    // with log_norm = log(2 pi I0(kappa)).
    void (*vonmises_ar_loglik)(const double* cosx, const double* sinx, std::size_t n,
                               std::size_t p, const double* phi, double anchor_c,
                               double anchor_s, double kappa, double log_norm,
                               double fallback_c, double fallback_s, double* out);
};

// The backend picked at startup: the widest SIMD variant the CPU supports,
// overridable with ARHMM_KERNELS=scalar|avx2|neon.
const Backend& active();

const Backend& scalar();

// All variants usable on this machine, scalar first.
std::vector<const Backend*> available();

// Forces a specific backend (mainly for tests); returns false if the name is
// unknown or unsupported on this CPU.
bool force(std::string_view name);

} // namespace arhmm::kernels
