#include "doctest.h"
#include "kloewner/scmap.hpp"
#include "kloewner/simd.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace kloewner;

namespace {

double max_rel_diff(const std::vector<double>& ar, const std::vector<double>& ai,
                    const std::vector<double>& br, const std::vector<double>& bi) {
  double m = 0.0;
  for (std::size_t i = 0; i < ar.size(); ++i) {
    const double d = std::hypot(ar[i] - br[i], ai[i] - bi[i]);
    m = std::max(m, d / std::max(1.0, std::hypot(ar[i], ai[i])));
  }
  return m;
}

}  // namespace

TEST_CASE("avx2 stage kernels match the scalar reference") {
  if (!simd::avx2_available()) {
    MESSAGE("avx2 unavailable; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx base = std::polar(1.0, 3.0 * u(rng));
    const cplx target = 0.8 * std::polar(std::abs(u(rng)), 3.0 * u(rng)) + 0.1 * base;
    const SlitStage st = SlitStage::towards(base, target);
    const simd::StageCoeffs c = st.coeffs();
    const std::size_t n = 37;
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx z;
      do z = {u(rng), u(rng)};
      while (std::abs(z) > 0.99);
      re[i] = z.real();
      im[i] = z.imag();
    }
    auto r1 = re, i1 = im, r2 = re, i2 = im;
    simd::scalar::stage_forward(c, r1.data(), i1.data(), n);
    simd::avx2::stage_forward(c, r2.data(), i2.data(), n);
    CHECK(max_rel_diff(r1, i1, r2, i2) < 1e-12);
    simd::scalar::stage_inverse(c, r1.data(), i1.data(), n);
    simd::avx2::stage_inverse(c, r2.data(), i2.data(), n);
    CHECK(max_rel_diff(r1, i1, r2, i2) < 1e-11);
    CHECK(max_rel_diff(r1, i1, re, im) < 1e-10);

    const double xr[3] = {std::cos(0.3), std::cos(2.0), std::cos(-2.2)};
    const double xi[3] = {std::sin(0.3), std::sin(2.0), std::sin(-2.2)};
    const double lam[3] = {0.2, 0.5, 0.3};
    std::vector<double> o1r(n), o1i(n), o2r(n), o2i(n);
    simd::scalar::loewner_rhs(xr, xi, lam, 3, re.data(), im.data(), o1r.data(), o1i.data(), n);
    simd::avx2::loewner_rhs(xr, xi, lam, 3, re.data(), im.data(), o2r.data(), o2i.data(), n);
    CHECK(max_rel_diff(o1r, o1i, o2r, o2i) < 1e-12);
  }
}

TEST_CASE("dispatch honours forced isa") {
  const simd::Isa before = simd::active_isa();
  simd::set_isa(simd::Isa::Scalar);
  CHECK(simd::active_isa() == simd::Isa::Scalar);
  simd::set_isa(before);
  CHECK(simd::active_isa() == before);
}
