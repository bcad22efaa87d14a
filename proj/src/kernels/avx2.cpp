#include "backends.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <cstddef>

// AVX2 + FMA backend. Four doubles per lane-group; tails fall back to the
// same scalar expressions the reference backend uses. The only transcendental
// needed in these loops is log(), implemented below with the classic
// exponent/mantissa split and an atanh-style polynomial, accurate to ~1 ulp
// for positive finite inputs.

namespace arhmm::kernels {
namespace {

// log(1+f) correction polynomial coefficients (minimax over the reduced
// interval |s| <= 0.1716 where s = f/(2+f)).
constexpr double kLg1 = 6.666666666666735130e-01;
constexpr double kLg2 = 3.999999999940941908e-01;
constexpr double kLg3 = 2.857142874366239149e-01;
constexpr double kLg4 = 2.222219843214978396e-01;
constexpr double kLg5 = 1.818357216161805012e-01;
constexpr double kLg6 = 1.531383769920937332e-01;
constexpr double kLg7 = 1.479819860511658591e-01;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;

// Natural log of four positive finite doubles. Subnormals are rescaled by
// 2^54 first so the exponent extraction stays valid.
inline __m256d vlog4(__m256d x) {
  const __m256d dbl_min = _mm256_set1_pd(2.2250738585072014e-308);
  const __m256d tiny = _mm256_cmp_pd(x, dbl_min, _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(0x1p54)), tiny);
  const __m256d e_adjust = _mm256_and_pd(tiny, _mm256_set1_pd(54.0));

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_bits = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
      _mm256_set1_epi64x(0x3FF0000000000000ll));
  __m256d m = _mm256_castsi256_pd(mant_bits);

  // Biased exponent to double: OR the small integer into the low bits of
  // 2^52 and subtract 2^52.
  const __m256i ebits = _mm256_srli_epi64(bits, 52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(
          _mm256_or_si256(ebits, _mm256_set1_epi64x(0x4330000000000000ll))),
      _mm256_set1_pd(0x1p52));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
  e = _mm256_sub_pd(e, e_adjust);

  // Fold the mantissa into [sqrt(2)/2, sqrt(2)).
  const __m256d ge = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), ge);
  e = _mm256_add_pd(e, _mm256_and_pd(ge, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_sub_pd(m, one);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);

  __m256d t1 = _mm256_fmadd_pd(w, _mm256_set1_pd(kLg6), _mm256_set1_pd(kLg4));
  t1 = _mm256_fmadd_pd(w, t1, _mm256_set1_pd(kLg2));
  t1 = _mm256_mul_pd(w, t1);
  __m256d t2 = _mm256_fmadd_pd(w, _mm256_set1_pd(kLg7), _mm256_set1_pd(kLg5));
  t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(kLg3));
  t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(kLg1));
  t2 = _mm256_mul_pd(z, t2);
  const __m256d r = _mm256_add_pd(t1, t2);

  const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), f), f);
  // log(x) = e*ln2_hi - ((hfsq - (s*(hfsq+r) + e*ln2_lo)) - f)
  const __m256d corr = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r),
                                       _mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo)));
  const __m256d inner = _mm256_sub_pd(_mm256_sub_pd(hfsq, corr), f);
  return _mm256_fmsub_pd(e, _mm256_set1_pd(kLn2Hi), inner);
}

void log_series_avx2(const double* x, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, vlog4(_mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) out[i] = std::log(x[i]);
}

void gamma_ar_loglik_avx2(const double* x, const double* log_x, std::size_t n,
                          std::size_t p, const double* phi, double anchor,
                          double shape, double c0, double* out) {
  if (n <= p) return;
  const std::size_t count = n - p;
  const __m256d vanchor = _mm256_set1_pd(anchor);
  const __m256d vshape = _mm256_set1_pd(shape);
  const __m256d vshape_m1 = _mm256_set1_pd(shape - 1.0);
  const __m256d vc0 = _mm256_set1_pd(c0);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const std::size_t t = p + i;
    __m256d mean = vanchor;
    for (std::size_t k = 0; k < p; ++k) {
      mean = _mm256_fmadd_pd(_mm256_set1_pd(phi[k]),
                             _mm256_loadu_pd(x + t - 1 - k), mean);
    }
    const __m256d xv = _mm256_loadu_pd(x + t);
    const __m256d lx = _mm256_loadu_pd(log_x + t);
    __m256d acc = _mm256_fnmadd_pd(vshape, vlog4(mean), vc0);
    acc = _mm256_fmadd_pd(vshape_m1, lx, acc);
    acc = _mm256_fnmadd_pd(vshape, _mm256_div_pd(xv, mean), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < count; ++i) {
    const std::size_t t = p + i;
    double mean = anchor;
    for (std::size_t k = 0; k < p; ++k) mean += phi[k] * x[t - 1 - k];
    out[i] = c0 - shape * std::log(mean) + (shape - 1.0) * log_x[t] -
             shape * (x[t] / mean);
  }
}

void vonmises_ar_loglik_avx2(const double* cos_x, const double* sin_x,
                             std::size_t n, std::size_t p, const double* phi,
                             double anchor_c, double anchor_s, double kappa,
                             double log_norm, double fallback_c,
                             double fallback_s, double* out) {
  if (n <= p) return;
  const std::size_t count = n - p;
  const __m256d vac = _mm256_set1_pd(anchor_c);
  const __m256d vas = _mm256_set1_pd(anchor_s);
  const __m256d vkappa = _mm256_set1_pd(kappa);
  const __m256d vlnorm = _mm256_set1_pd(log_norm);
  const __m256d vfc = _mm256_set1_pd(fallback_c);
  const __m256d vfs = _mm256_set1_pd(fallback_s);
  const __m256d tiny = _mm256_set1_pd(1e-12);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const std::size_t t = p + i;
    __m256d rc = vac;
    __m256d rs = vas;
    for (std::size_t k = 0; k < p; ++k) {
      const __m256d w = _mm256_set1_pd(phi[k]);
      rc = _mm256_fmadd_pd(w, _mm256_loadu_pd(cos_x + t - 1 - k), rc);
      rs = _mm256_fmadd_pd(w, _mm256_loadu_pd(sin_x + t - 1 - k), rs);
    }
    const __m256d cx = _mm256_loadu_pd(cos_x + t);
    const __m256d sx = _mm256_loadu_pd(sin_x + t);
    const __m256d r = _mm256_sqrt_pd(
        _mm256_fmadd_pd(rc, rc, _mm256_mul_pd(rs, rs)));
    const __m256d num = _mm256_fmadd_pd(cx, rc, _mm256_mul_pd(sx, rs));
    const __m256d cos_main = _mm256_div_pd(num, r);
    const __m256d cos_fb = _mm256_fmadd_pd(cx, vfc, _mm256_mul_pd(sx, vfs));
    const __m256d degenerate = _mm256_cmp_pd(r, tiny, _CMP_LT_OQ);
    const __m256d cos_diff = _mm256_blendv_pd(cos_main, cos_fb, degenerate);
    _mm256_storeu_pd(out + i, _mm256_fmsub_pd(vkappa, cos_diff, vlnorm));
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

const Backend& avx2() {
  static const Backend backend{"avx2", &log_series_avx2, &gamma_ar_loglik_avx2,
                               &vonmises_ar_loglik_avx2};
  return backend;
}

bool avx2_supported() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

} // namespace arhmm::kernels

#endif // x86_64
