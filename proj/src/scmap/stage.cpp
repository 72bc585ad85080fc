#include "kloewner/error.hpp"
#include "kloewner/scmap.hpp"

#include <cmath>

namespace kloewner {
namespace {

const cplx I{0.0, 1.0};

cplx apply_forward(const simd::StageCoeffs& c, cplx z) {
  double re = z.real(), im = z.imag();
  simd::scalar::stage_forward(c, &re, &im, 1);
  return {re, im};
}

cplx apply_inverse(const simd::StageCoeffs& c, cplx w) {
  double re = w.real(), im = w.imag();
  simd::scalar::stage_inverse(c, &re, &im, 1);
  return {re, im};
}

}  // namespace

void SlitStage::frame(cplx base, cplx target, double& k, double& h_full) {
  const cplx zc = I * (base - target) / (base + target);
  const double n = std::norm(zc);
  if (!(zc.imag() > 0.0) || !(n > 0.0)) {
    throw Error(ErrorCode::AccuracyNotReached, "geodesic target not inside the disk", -1, -1, zc.imag());
  }
  k = zc.real() / n;
  h_full = n / zc.imag();
}

SlitStage SlitStage::make(cplx base, double k, double height, int slit) {
  SlitStage s;
  s.base = base;
  s.k = k;
  s.height = height;
  s.slit = slit;
  const cplx omk = 1.0 - k * I;
  const cplx l0 = I / omk;
  const cplx s0 = std::sqrt(1.0 + height * height / (l0 * l0));
  s.q = l0 * s0;
  const cplx dl = -2.0 * I / (base * omk * omk);
  const cplx d0 = dl / (s0 * (2.0 * I * s.q.imag()));
  s.rot = std::conj(d0) / std::abs(d0);
  s.lmr = std::log(std::abs(d0));
  return s;
}

SlitStage SlitStage::towards(cplx base, cplx target, int slit) {
  double k = 0.0, h = 0.0;
  frame(base, target, k, h);
  return make(base, k, h, slit);
}

simd::StageCoeffs SlitStage::coeffs() const {
  return {base.real(), base.imag(), k, height * height, q.real(), q.imag(), rot.real(), rot.imag()};
}

cplx SlitStage::frame_coordinate(cplx z) const {
  const cplx n = I * (base - z);
  return n / ((base + z) - k * n);
}

cplx SlitStage::forward(cplx z) const { return apply_forward(coeffs(), z); }

cplx SlitStage::inverse(cplx w) const { return apply_inverse(coeffs(), w); }

cplx SlitStage::derivative(cplx z) const {
  const cplx n = I * (base - z);
  const cplx dn = (base + z) - k * n;
  const cplx l = n / dn;
  const cplx dl = (-I * dn - n * (1.0 + k * I)) / (dn * dn);
  const cplx s = std::sqrt(1.0 + height * height / (l * l));
  const cplx f = l * s;
  const cplx fq = f - std::conj(q);
  return dl / s * rot * (q - std::conj(q)) / (fq * fq);
}

cplx SlitStage::tip_image() const { return rot * q / std::conj(q); }

std::pair<cplx, cplx> SlitStage::base_images() const {
  const cplx yp{height, 0.0};
  const cplx ym{-height, 0.0};
  return {rot * (yp - q) / (yp - std::conj(q)), rot * (ym - q) / (ym - std::conj(q))};
}

}  // namespace kloewner
