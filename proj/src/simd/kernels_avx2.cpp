#include "kloewner/simd.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define KLOEWNER_HAVE_AVX2_TU 1
#endif

namespace kloewner::simd::avx2 {

#ifdef KLOEWNER_HAVE_AVX2_TU
namespace {

struct V {
  __m256d r, i;
};

inline V mul(V a, V b) {
  return {_mm256_fmsub_pd(a.r, b.r, _mm256_mul_pd(a.i, b.i)),
          _mm256_fmadd_pd(a.r, b.i, _mm256_mul_pd(a.i, b.r))};
}

inline V div(V a, V b) {
  const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0),
                                    _mm256_fmadd_pd(b.r, b.r, _mm256_mul_pd(b.i, b.i)));
  return {_mm256_mul_pd(_mm256_fmadd_pd(a.r, b.r, _mm256_mul_pd(a.i, b.i)), inv),
          _mm256_mul_pd(_mm256_fmsub_pd(a.i, b.r, _mm256_mul_pd(a.r, b.i)), inv)};
}

inline V sqrt(V z) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d absx = _mm256_andnot_pd(sign, z.r);
  const __m256d absy = _mm256_andnot_pd(sign, z.i);
  const __m256d r = _mm256_sqrt_pd(_mm256_fmadd_pd(z.r, z.r, _mm256_mul_pd(z.i, z.i)));
  __m256d a = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_add_pd(r, absx)));
  a = _mm256_max_pd(a, _mm256_set1_pd(1e-300));
  const __m256d h = _mm256_div_pd(_mm256_set1_pd(0.5), a);
  const __m256d nonneg = _mm256_cmp_pd(z.r, _mm256_setzero_pd(), _CMP_GE_OQ);
  const __m256d re_neg = _mm256_mul_pd(absy, h);
  const __m256d im_pos = _mm256_mul_pd(z.i, h);
  const __m256d im_neg = _mm256_or_pd(a, _mm256_and_pd(sign, z.i));
  return {_mm256_blendv_pd(re_neg, a, nonneg), _mm256_blendv_pd(im_neg, im_pos, nonneg)};
}

inline V splat(double r, double i) { return {_mm256_set1_pd(r), _mm256_set1_pd(i)}; }
inline V add(V a, V b) { return {_mm256_add_pd(a.r, b.r), _mm256_add_pd(a.i, b.i)}; }
inline V sub(V a, V b) { return {_mm256_sub_pd(a.r, b.r), _mm256_sub_pd(a.i, b.i)}; }

}  // namespace

void stage_forward(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  const V b = splat(c.br, c.bi);
  const __m256d k = _mm256_set1_pd(c.k);
  const V y2 = splat(c.y2, 0.0);
  const V one = splat(1.0, 0.0);
  const V q = splat(c.qr, c.qi);
  const V qc = splat(c.qr, -c.qi);
  const V rot = splat(c.rr, c.ri);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const V z{_mm256_loadu_pd(re + j), _mm256_loadu_pd(im + j)};
    const V d0 = sub(b, z);
    const V num{_mm256_sub_pd(_mm256_setzero_pd(), d0.i), d0.r};
    const V s0 = add(b, z);
    const V den{_mm256_fnmadd_pd(k, num.r, s0.r), _mm256_fnmadd_pd(k, num.i, s0.i)};
    const V l = div(num, den);
    const V t = div(y2, mul(l, l));
    const V s = sqrt(add(one, t));
    const V f = mul(l, s);
    const V out = mul(rot, div(sub(f, q), sub(f, qc)));
    _mm256_storeu_pd(re + j, out.r);
    _mm256_storeu_pd(im + j, out.i);
  }
  if (j < n) scalar::stage_forward(c, re + j, im + j, n - j);
}

void stage_inverse(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  const V b = splat(c.br, c.bi);
  const V y2 = splat(c.y2, 0.0);
  const V one = splat(1.0, 0.0);
  const V ii = splat(0.0, 1.0);
  const V q = splat(c.qr, c.qi);
  const V qc = splat(c.qr, -c.qi);
  const V rotc = splat(c.rr, -c.ri);
  const V omk = splat(1.0, -c.k);
  const V opk = splat(1.0, c.k);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const V w{_mm256_loadu_pd(re + j), _mm256_loadu_pd(im + j)};
    const V v = mul(rotc, w);
    const V f = div(sub(q, mul(qc, v)), sub(one, v));
    const V a = div(y2, mul(f, f));
    const V s = sqrt(sub(one, a));
    const V l = mul(f, s);
    const V out = mul(b, div(sub(ii, mul(l, omk)), add(ii, mul(l, opk))));
    _mm256_storeu_pd(re + j, out.r);
    _mm256_storeu_pd(im + j, out.i);
  }
  if (j < n) scalar::stage_inverse(c, re + j, im + j, n - j);
}

void loewner_rhs(const double* xr, const double* xi, const double* lam, std::size_t m,
                 const double* zr, const double* zi, double* outr, double* outi, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const V z{_mm256_loadu_pd(zr + j), _mm256_loadu_pd(zi + j)};
    V acc{_mm256_setzero_pd(), _mm256_setzero_pd()};
    for (std::size_t kk = 0; kk < m; ++kk) {
      const V x = splat(xr[kk], xi[kk]);
      const V p = div(add(x, z), sub(x, z));
      const __m256d l = _mm256_set1_pd(lam[kk]);
      acc.r = _mm256_fmadd_pd(l, p.r, acc.r);
      acc.i = _mm256_fmadd_pd(l, p.i, acc.i);
    }
    const V out = mul(z, acc);
    _mm256_storeu_pd(outr + j, out.r);
    _mm256_storeu_pd(outi + j, out.i);
  }
  if (j < n) scalar::loewner_rhs(xr, xi, lam, m, zr + j, zi + j, outr + j, outi + j, n - j);
}

#else

void stage_forward(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  scalar::stage_forward(c, re, im, n);
}
void stage_inverse(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  scalar::stage_inverse(c, re, im, n);
}
void loewner_rhs(const double* xr, const double* xi, const double* lam, std::size_t m,
                 const double* zr, const double* zi, double* outr, double* outi, std::size_t n) {
  scalar::loewner_rhs(xr, xi, lam, m, zr, zi, outr, outi, n);
}

#endif

}  // namespace kloewner::simd::avx2
