#include "kloewner/simd.hpp"

#include <cmath>

namespace kloewner::simd::scalar {
namespace {

inline void cdiv(double ar, double ai, double br, double bi, double& outr, double& outi) {
  const double inv = 1.0 / (br * br + bi * bi);
  outr = (ar * br + ai * bi) * inv;
  outi = (ai * br - ar * bi) * inv;
}

inline void cmul(double ar, double ai, double br, double bi, double& outr, double& outi) {
  outr = ar * br - ai * bi;
  outi = ar * bi + ai * br;
}

inline void csqrt(double x, double y, double& outr, double& outi) {
  const double r = std::sqrt(x * x + y * y);
  double a = std::sqrt(0.5 * (r + std::fabs(x)));
  if (a < 1e-300) a = 1e-300;
  const double h = 0.5 / a;
  if (x >= 0.0) {
    outr = a;
    outi = y * h;
  } else {
    outr = std::fabs(y) * h;
    outi = std::copysign(a, y);
  }
}

}  // namespace

void stage_forward(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double x = re[j], y = im[j];
    const double nr = -(c.bi - y), ni = c.br - x;
    const double dr = (c.br + x) - c.k * nr, di = (c.bi + y) - c.k * ni;
    double lr, li;
    cdiv(nr, ni, dr, di, lr, li);
    double l2r, l2i;
    cmul(lr, li, lr, li, l2r, l2i);
    double tr, ti;
    cdiv(c.y2, 0.0, l2r, l2i, tr, ti);
    double sr, si;
    csqrt(1.0 + tr, ti, sr, si);
    double fr, fi;
    cmul(lr, li, sr, si, fr, fi);
    double ur, ui;
    cdiv(fr - c.qr, fi - c.qi, fr - c.qr, fi + c.qi, ur, ui);
    cmul(c.rr, c.ri, ur, ui, re[j], im[j]);
  }
}

void stage_inverse(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double vr, vi;
    cmul(c.rr, -c.ri, re[j], im[j], vr, vi);
    // F = (q - conj(q) v) / (1 - v)
    double tr, ti;
    cmul(c.qr, -c.qi, vr, vi, tr, ti);
    double fr, fi;
    cdiv(c.qr - tr, c.qi - ti, 1.0 - vr, -vi, fr, fi);
    double f2r, f2i;
    cmul(fr, fi, fr, fi, f2r, f2i);
    double ar, ai;
    cdiv(c.y2, 0.0, f2r, f2i, ar, ai);
    double sr, si;
    csqrt(1.0 - ar, -ai, sr, si);
    double lr, li;
    cmul(fr, fi, sr, si, lr, li);
    // z = b (i - L(1 - ik)) / (i + L(1 + ik))
    double p1r, p1i, p2r, p2i;
    cmul(lr, li, 1.0, -c.k, p1r, p1i);
    cmul(lr, li, 1.0, c.k, p2r, p2i);
    double qr, qi;
    cdiv(-p1r, 1.0 - p1i, p2r, 1.0 + p2i, qr, qi);
    cmul(c.br, c.bi, qr, qi, re[j], im[j]);
  }
}

void loewner_rhs(const double* xr, const double* xi, const double* lam, std::size_t m,
                 const double* zr, const double* zi, double* outr, double* outi, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double sr = 0.0, si = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      double pr, pi;
      cdiv(xr[k] + zr[j], xi[k] + zi[j], xr[k] - zr[j], xi[k] - zi[j], pr, pi);
      sr += lam[k] * pr;
      si += lam[k] * pi;
    }
    cmul(zr[j], zi[j], sr, si, outr[j], outi[j]);
  }
}

}  // namespace kloewner::simd::scalar
