#include "doctest.h"
#include "helpers.hpp"
#include "kloewner/error.hpp"
#include "kloewner/scmap.hpp"
#include "kloewner/zipper.hpp"

#include <cmath>
#include <vector>

using namespace kloewner;
using testutil::radial_capacity;

TEST_CASE("single stage normalisation") {
  const cplx base = std::polar(1.0, 0.7);
  const SlitStage st = SlitStage::towards(base, 0.6 * std::polar(1.0, 0.9));
  CHECK(std::abs(st.forward(0.0)) < 1e-15);
  const cplx d = st.derivative(0.0);
  CHECK(std::abs(d.imag()) < 1e-13);
  CHECK(std::log(d.real()) == doctest::Approx(st.lmr).epsilon(1e-12));
  CHECK(std::abs(std::abs(st.tip_image()) - 1.0) < 1e-14);
  const auto [a, b] = st.base_images();
  CHECK(std::abs(std::abs(a) - 1.0) < 1e-14);
  CHECK(std::abs(std::abs(b) - 1.0) < 1e-14);
  for (cplx z : {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0.1, -0.8)}) {
    CHECK(std::abs(st.inverse(st.forward(z)) - z) < 1e-13);
    const double h = 1e-6;
    const cplx fd = (st.forward(z + h) - st.forward(z - h)) / (2.0 * h);
    CHECK(std::abs(fd - st.derivative(z)) < 1e-7 * std::abs(fd));
  }
}

TEST_CASE("radial slit matches the closed-form capacity") {
  const HullConfig cfg = testutil::single_radial(1.0 / 3.0, 9);
  const double T = cfg.horizon;
  CHECK(T == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));
  const std::vector<double> tr{T};
  const ConformalMapRep m = build_hull_map(cfg, tr);
  CHECK(std::abs(lmr(m) - std::log(4.0 / 3.0)) < 1e-12);
  CHECK(std::abs(lmr_finite_difference(m) - lmr(m)) < 1e-6);
  // interior truncation: tip radius r solves the capacity law at the truncated point
  for (double t : {0.05, 0.1, 0.2}) {
    const std::vector<double> tt{t};
    const ConformalMapRep mt = build_hull_map(cfg, tt);
    const cplx tip = sample_curve(cfg.curves[0], t);
    // the hull is the radial segment up to a point near the linear interpolant
    CHECK(std::abs(lmr(mt) - radial_capacity(tip.real())) < 5e-3);
    CHECK(std::abs(tip_image(mt, cfg, 0) - cplx(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("empty hull is the identity") {
  const HullConfig cfg = testutil::single_radial();
  const std::vector<double> tr{0.0};
  const ConformalMapRep m = build_hull_map(cfg, tr);
  CHECK(m.is_identity());
  CHECK(lmr(m) == 0.0);
  CHECK(evaluate(m, cplx(0.3, 0.4)) == cplx(0.3, 0.4));
  CHECK(evaluate_inverse(m, 0.0) == cplx(0.0));
  CHECK(tip_image(m, cfg, 0) == cplx(1.0, 0.0));
  const std::vector<double> bad{cfg.horizon * 2.0};
  CHECK_THROWS_AS(build_hull_map(cfg, bad), Error);
  try {
    build_hull_map(cfg, bad);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationOutOfRange);
  }
}

TEST_CASE("evaluation properties of a bent two-slit hull") {
  const HullConfig cfg = testutil::symmetric_pair(0.8, 0.6, 0.5, 24, 0.2);
  REQUIRE_NOTHROW(validate_hull_config(cfg));
  const std::vector<double> tr{0.2, 0.2};
  const ConformalMapRep m = build_hull_map(cfg, tr);
  CHECK(lmr(m) > 0.0);
  CHECK(std::abs(lmr_finite_difference(m) - lmr(m)) < 1e-6);
  const cplx xi0 = tip_image(m, cfg, 0), xi1 = tip_image(m, cfg, 1);
  CHECK(std::abs(xi0 - std::conj(xi1)) < 1e-6);
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, -0.5), cplx(0.3, 0.0)}) {
    const cplx w = evaluate(m, z);
    CHECK(std::abs(w) < 1.0);
    CHECK(std::abs(evaluate_inverse(m, w) - z) < 1e-7);
    CHECK(std::abs(evaluate(m, std::conj(z)) - std::conj(w)) < 1e-6);
  }
  const cplx dinv = m.inverse_derivative(0.0);
  CHECK(std::log(std::abs(dinv)) == doctest::Approx(-lmr(m)).epsilon(1e-10));
  CHECK_THROWS_AS(evaluate(m, cplx(1.2, 0.0)), Error);
  CHECK_THROWS_AS(evaluate_inverse(m, xi0), Error);
}

TEST_CASE("composition adds lmr") {
  const HullConfig a = testutil::single_radial(0.5, 5);
  HullConfig b;
  b.curves.push_back(testutil::bent_curve(2.0, 0.3, 0.3, 12, 1.0));
  b.horizon = 1.0;
  const std::vector<double> ta{a.horizon}, tb{1.0};
  const ConformalMapRep ma = build_hull_map(a, ta);
  const ConformalMapRep mb = build_hull_map(b, tb);
  const ConformalMapRep c = ma.after(mb);
  CHECK(lmr(c) == doctest::Approx(lmr(ma) + lmr(mb)).epsilon(1e-14));
  CHECK(std::abs(lmr_finite_difference(c) - lmr(c)) < 1e-6);
}

TEST_CASE("truncation inside a segment is insertion independent") {
  HullConfig cfg;
  cfg.curves.push_back(testutil::bent_curve(0.4, 0.8, 0.6, 10, 1.0));
  cfg.horizon = 1.0;
  const HullGeometry g = HullGeometry::build(cfg);
  ZipperBuilder direct(g);
  const std::vector<double> t1{0.83};
  direct.advance(t1);
  ZipperBuilder steps(g);
  for (int i = 1; i <= 83; ++i) {
    const std::vector<double> ti{0.01 * i};
    steps.advance(ti);
  }
  CHECK(std::abs(direct.lmr() - steps.lmr()) < 1e-12);
  CHECK(std::abs(direct.tip_image(0) - steps.tip_image(0)) < 1e-10);
  // probe leaves state untouched and agrees with a committed advance
  ZipperBuilder p(g);
  const std::vector<double> half{0.4};
  p.advance(half);
  const double before = p.lmr();
  const double probed = p.probe_lmr(0, 0.83);
  CHECK(p.lmr() == before);
  CHECK(std::abs(probed - direct.lmr()) < 1e-12);
}

TEST_CASE("geometric refinement bounds the chord deviation") {
  HullConfig cfg;
  cfg.curves.push_back(testutil::bent_curve(0.0, 2.0, 0.7, 4, 1.0));
  cfg.horizon = 1.0;
  ScmapOptions o;
  const HullGeometry g = HullGeometry::build(cfg, o);
  CHECK(g.inserted() > 0);
  CHECK(g.max_deviation() <= o.tol_seg);
  // inserted knots lie on the polyline at linear times
  for (const auto& s : g.knots(0)) CHECK(std::abs(sample_curve(cfg.curves[0], s.t) - s.z) < 1e-14);
}

TEST_CASE("rotation equivariance") {
  const HullConfig cfg = testutil::symmetric_pair(0.8, 0.6, 0.5, 16, 0.2);
  const double alpha = 1.1;
  const HullConfig rc = rotate(cfg, alpha);
  const std::vector<double> tr{0.2, 0.15};
  const ConformalMapRep m = build_hull_map(cfg, tr);
  const ConformalMapRep mr = build_hull_map(rc, tr);
  CHECK(std::abs(lmr(m) - lmr(mr)) < 1e-9);
  const cplx rot = std::polar(1.0, alpha);
  const cplx z{0.2, -0.3};
  CHECK(std::abs(evaluate(mr, rot * z) - rot * evaluate(m, z)) < 1e-7);
}

TEST_CASE("monotonicity in both truncation variables") {
  const HullConfig cfg = testutil::symmetric_pair(1.0, 0.4, 0.5, 16, 0.3);
  const HullGeometry g = HullGeometry::build(cfg);
  double prev = -1.0;
  for (double t : {0.05, 0.1, 0.15, 0.2}) {
    const std::vector<double> tr{t, 0.1};
    const double v = lmr(build_hull_map(g, tr));
    CHECK(v > prev);
    prev = v;
  }
  prev = -1.0;
  for (double tau : {0.0, 0.05, 0.1, 0.2}) {
    const std::vector<double> tr{0.1, tau};
    const double v = lmr(build_hull_map(g, tr));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("boundary arc images") {
  const HullConfig cfg = testutil::symmetric_pair(0.9, 0.5, 0.5, 20, 0.3);
  const HullGeometry g = HullGeometry::build(cfg);
  const std::vector<double> tau{0.3, 0.2};
  const BoundaryArc pt = boundary_arc_image(g, 0, 0.1, 0.1, tau, ArcTag::CircleArc);
  REQUIRE(pt.samples.size() == 1);
  std::vector<double> tr{0.1, 0.2};
  const ConformalMapRep m = build_hull_map(g, tr);
  CHECK(std::abs(pt.samples[0] - m.tip_images[0]) < 1e-12);

  const BoundaryArc s = boundary_arc_image(g, 0, 0.1, 0.2, tau, ArcTag::CircleArc);
  for (cplx w : s.samples) CHECK(std::abs(std::abs(w) - 1.0) < 1e-8);
  tr = {0.2, 0.2};
  const ConformalMapRep m2 = build_hull_map(g, tr);
  bool found = false;
  for (cplx w : s.samples) found = found || std::abs(w - m2.tip_images[0]) < 1e-6;
  CHECK(found);
  const BoundaryArc S = boundary_arc_image(g, 0, 0.1, 0.2, tau, ArcTag::SlitImage);
  CHECK(std::abs(S.samples.front() - m.tip_images[0]) < 1e-12);
  for (std::size_t i = 1; i < S.samples.size(); ++i) CHECK(std::abs(S.samples[i]) < 1.0);

  double prev = 10.0;
  for (double dt : {0.08, 0.04, 0.02, 0.01}) {
    const double d = boundary_arc_image(g, 0, 0.1, 0.1 + dt, tau, ArcTag::CircleArc).diameter();
    CHECK(d < prev);
    prev = d;
  }
}
