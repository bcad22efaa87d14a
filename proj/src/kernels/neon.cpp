#include "backends.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstdint>
#include <cstddef>

// NEON backend (two doubles per lane-group). Mirrors the AVX2 variant; the
// vectorized log uses the same exponent/mantissa reduction and polynomial.

namespace arhmm::kernels {
namespace {

constexpr double kLg1 = 6.666666666666735130e-01;
constexpr double kLg2 = 3.999999999940941908e-01;
constexpr double kLg3 = 2.857142874366239149e-01;
constexpr double kLg4 = 2.222219843214978396e-01;
constexpr double kLg5 = 1.818357216161805012e-01;
constexpr double kLg6 = 1.531383769920937332e-01;
constexpr double kLg7 = 1.479819860511658591e-01;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;

inline float64x2_t vlog2(float64x2_t x) {
  const uint64x2_t tiny = vcltq_f64(x, vdupq_n_f64(2.2250738585072014e-308));
  x = vbslq_f64(tiny, vmulq_f64(x, vdupq_n_f64(0x1p54)), x);
  const float64x2_t e_adjust =
      vbslq_f64(tiny, vdupq_n_f64(54.0), vdupq_n_f64(0.0));

  const uint64x2_t bits = vreinterpretq_u64_f64(x);
  const uint64x2_t mant_bits =
      vorrq_u64(vandq_u64(bits, vdupq_n_u64(0x000FFFFFFFFFFFFFull)),
                vdupq_n_u64(0x3FF0000000000000ull));
  float64x2_t m = vreinterpretq_f64_u64(mant_bits);

  const int64x2_t ebits = vreinterpretq_s64_u64(vshrq_n_u64(bits, 52));
  float64x2_t e = vsubq_f64(vcvtq_f64_s64(ebits), vdupq_n_f64(1023.0));
  e = vsubq_f64(e, e_adjust);

  const uint64x2_t ge = vcgeq_f64(m, vdupq_n_f64(1.4142135623730951));
  m = vbslq_f64(ge, vmulq_f64(m, vdupq_n_f64(0.5)), m);
  e = vaddq_f64(e, vbslq_f64(ge, vdupq_n_f64(1.0), vdupq_n_f64(0.0)));

  const float64x2_t f = vsubq_f64(m, vdupq_n_f64(1.0));
  const float64x2_t s = vdivq_f64(f, vaddq_f64(vdupq_n_f64(2.0), f));
  const float64x2_t z = vmulq_f64(s, s);
  const float64x2_t w = vmulq_f64(z, z);

  float64x2_t t1 = vfmaq_f64(vdupq_n_f64(kLg4), w, vdupq_n_f64(kLg6));
  t1 = vfmaq_f64(vdupq_n_f64(kLg2), w, t1);
  t1 = vmulq_f64(w, t1);
  float64x2_t t2 = vfmaq_f64(vdupq_n_f64(kLg5), w, vdupq_n_f64(kLg7));
  t2 = vfmaq_f64(vdupq_n_f64(kLg3), w, t2);
  t2 = vfmaq_f64(vdupq_n_f64(kLg1), w, t2);
  t2 = vmulq_f64(z, t2);
  const float64x2_t r = vaddq_f64(t1, t2);

  const float64x2_t hfsq = vmulq_f64(vmulq_f64(vdupq_n_f64(0.5), f), f);
  const float64x2_t corr =
      vfmaq_f64(vmulq_f64(e, vdupq_n_f64(kLn2Lo)), s, vaddq_f64(hfsq, r));
  const float64x2_t inner = vsubq_f64(vsubq_f64(hfsq, corr), f);
  return vfmsq_f64(vmulq_f64(e, vdupq_n_f64(kLn2Hi)), vdupq_n_f64(1.0), inner);
}

void log_series_neon(const double* x, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vlog2(vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = std::log(x[i]);
}

void gamma_ar_loglik_neon(const double* x, const double* log_x, std::size_t n,
                          std::size_t p, const double* phi, double anchor,
                          double shape, double c0, double* out) {
  if (n <= p) return;
  const std::size_t count = n - p;
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    const std::size_t t = p + i;
    float64x2_t mean = vdupq_n_f64(anchor);
    for (std::size_t k = 0; k < p; ++k) {
      mean = vfmaq_n_f64(mean, vld1q_f64(x + t - 1 - k), phi[k]);
    }
    const float64x2_t xv = vld1q_f64(x + t);
    const float64x2_t lx = vld1q_f64(log_x + t);
    float64x2_t acc = vfmsq_f64(vdupq_n_f64(c0), vdupq_n_f64(shape), vlog2(mean));
    acc = vfmaq_n_f64(acc, lx, shape - 1.0);
    acc = vfmsq_f64(acc, vdupq_n_f64(shape), vdivq_f64(xv, mean));
    vst1q_f64(out + i, acc);
  }
  for (; i < count; ++i) {
    const std::size_t t = p + i;
    double mean = anchor;
    for (std::size_t k = 0; k < p; ++k) mean += phi[k] * x[t - 1 - k];
    out[i] = c0 - shape * std::log(mean) + (shape - 1.0) * log_x[t] -
             shape * (x[t] / mean);
  }
}

void vonmises_ar_loglik_neon(const double* cos_x, const double* sin_x,
                             std::size_t n, std::size_t p, const double* phi,
                             double anchor_c, double anchor_s, double kappa,
                             double log_norm, double fallback_c,
                             double fallback_s, double* out) {
  if (n <= p) return;
  const std::size_t count = n - p;
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    const std::size_t t = p + i;
    float64x2_t rc = vdupq_n_f64(anchor_c);
    float64x2_t rs = vdupq_n_f64(anchor_s);
    for (std::size_t k = 0; k < p; ++k) {
      rc = vfmaq_n_f64(rc, vld1q_f64(cos_x + t - 1 - k), phi[k]);
      rs = vfmaq_n_f64(rs, vld1q_f64(sin_x + t - 1 - k), phi[k]);
    }
    const float64x2_t cx = vld1q_f64(cos_x + t);
    const float64x2_t sx = vld1q_f64(sin_x + t);
    const float64x2_t r =
        vsqrtq_f64(vfmaq_f64(vmulq_f64(rs, rs), rc, rc));
    const float64x2_t num = vfmaq_f64(vmulq_f64(sx, rs), cx, rc);
    const float64x2_t cos_main = vdivq_f64(num, r);
    const float64x2_t cos_fb =
        vfmaq_n_f64(vmulq_n_f64(sx, fallback_s), cx, fallback_c);
    const uint64x2_t degenerate = vcltq_f64(r, vdupq_n_f64(1e-12));
    const float64x2_t cos_diff = vbslq_f64(degenerate, cos_fb, cos_main);
    vst1q_f64(out + i,
              vfmaq_n_f64(vdupq_n_f64(-log_norm), cos_diff, kappa));
  }
  for (; i < count; ++i) {
    const std::size_t t = p + i;
    double rc = anchor_c;
    double rs = anchor_s;
    for (std::size_t k = 0; k < p; ++k) {
      rc += phi[k] * cos_x[t - 1 - k];
      rs += phi[k] * sin_x[t - 1 - k];
    }
    const double r = std::sqrt(rc * rc + rs * rs);
    double cos_diff;
    if (r < 1e-12) {
      cos_diff = cos_x[t] * fallback_c + sin_x[t] * fallback_s;
    } else {
      cos_diff = (cos_x[t] * rc + sin_x[t] * rs) / r;
    }
    out[i] = kappa * cos_diff - log_norm;
  }
}

} // namespace

const Backend& neon() {
  static const Backend backend{"neon", &log_series_neon, &gamma_ar_loglik_neon,
                               &vonmises_ar_loglik_neon};
  return backend;
}

} // namespace arhmm::kernels

#endif // __aarch64__
