#include "doctest.h"
#include "helpers.hpp"
#include "kloewner/error.hpp"
#include "kloewner/evolution.hpp"
#include "kloewner/scmap.hpp"

#include <cmath>
#include <vector>

using namespace kloewner;
using testutil::radial_capacity;

namespace {

DrivingSpec constant_driving(std::vector<double> theta, std::vector<double> grid) {
  DrivingSpec d;
  d.grid = grid;
  for (double th : theta) {
    d.theta.push_back(std::vector<double>(grid.size(), th));
    d.lambda.push_back(std::vector<double>(grid.size(), 1.0 / double(theta.size())));
  }
  return d;
}

DrivingSpec wavy_pair() {
  DrivingSpec d;
  for (int i = 0; i <= 10; ++i) d.grid.push_back(0.03 * i);
  d.theta.resize(2);
  d.lambda.resize(2);
  for (double t : d.grid) {
    d.theta[0].push_back(0.4 + 0.8 * t + 2.0 * t * t);
    d.theta[1].push_back(-1.9 - 0.5 * t);
    d.lambda[0].push_back(0.55 + 0.5 * t);
    d.lambda[1].push_back(0.45 - 0.5 * t);
  }
  return d;
}

}  // namespace

TEST_CASE("Moebius kernel") {
  CHECK(mobius_kernel(1.0, 0.0) == cplx(1.0, 0.0));
  CHECK(std::abs(mobius_kernel(1.0, -1.0)) < 1e-15);
  CHECK_THROWS_AS(mobius_kernel(1.0, 1.0 - 1e-9), Error);
  for (cplx z : {cplx(0.3, 0.5), cplx(-0.9, 0.1), cplx(0.0, -0.99)})
    CHECK(mobius_kernel(std::polar(1.0, 0.4), z).real() > 0.0);
}

TEST_CASE("driving interpolation and validation") {
  DrivingSpec d;
  d.grid = {0.0, 1.0};
  d.theta = {{0.0, 1.0}, {3.0, 3.0}};
  d.lambda = {{0.5, 0.2}, {0.5, 0.8}};
  const DrivingInterp di(d);
  CHECK(di.theta(0, 0.25) == doctest::Approx(0.25));
  const auto l = di.lambda(0.5);
  CHECK(l[0] + l[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l[0] == doctest::Approx(0.35));
  CHECK_THROWS_AS(di.theta(0, 1.5), Error);
  d.lambda = {{0.4, 0.4}, {0.4, 0.4}};
  try {
    DrivingInterp bad(d);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDriving);
  }
}

TEST_CASE("zero horizon returns the initial data") {
  const auto d = constant_driving({0.0}, {0.0, 0.5});
  const std::vector<cplx> pts{cplx(0.2, 0.3)};
  const auto tr = solve_forward({}, d, pts, 0.0);
  REQUIRE(tr.times.size() == 1);
  CHECK(tr.points[0][0] == pts[0]);
  CHECK(tr.tips[0][0] == cplx(1.0, 0.0));
  CHECK(tr.lmr[0] == 0.0);
}

TEST_CASE("radial slit law") {
  const auto d = constant_driving({0.0}, {0.0, 0.1, std::log(4.0 / 3.0), 0.5});
  const std::vector<cplx> pts{cplx(-0.5, 0.0), cplx(0.3, 0.4), cplx(-0.2, -0.7)};
  const auto tr = solve_forward({}, d, pts, 0.5);
  REQUIRE(tr.times.size() == 4);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const cplx tip = tr.tips[0][i];
    const double r = std::abs(tip);
    CHECK(std::abs(4.0 * r / ((1.0 + r) * (1.0 + r)) - std::exp(-tr.times[i])) < 1e-7);
    CHECK(std::abs(std::arg(tip)) < 1e-10);
    CHECK(std::abs(tr.points[i][0].imag()) < 1e-12);
    CHECK(tr.lmr[i] == doctest::Approx(tr.times[i]).epsilon(1e-12));
  }
  CHECK(std::abs(tr.tips[0][2] - 1.0 / 3.0) < 1e-7);
  // the elementary-map composition agrees with the flow
  HullConfig cfg = testutil::single_radial(std::abs(tr.tips[0].back()), 2);
  cfg.curves[0].samples.back().t = 0.5;
  const double tr_[1] = {0.5};
  const auto map = build_hull_map(cfg, tr_);
  CHECK(std::abs(lmr(map) - 0.5) < 50e-9);
  for (std::size_t p = 0; p < pts.size(); ++p) CHECK(std::abs(map.evaluate(pts[p]) - tr.points.back()[p]) < 1e-7);
}

TEST_CASE("points on the hull are swallowed") {
  const auto d = constant_driving({0.0}, {0.0, 0.2});
  const std::vector<cplx> pts{cplx(0.5, 0.0), cplx(0.0, 0.5)};
  EvolutionOptions o;
  o.trace_tips = false;
  const auto tr = solve_forward({}, d, pts, 0.2, o);
  CHECK(tr.truncated);
  CHECK(tr.swallowed[0]);
  CHECK_FALSE(tr.swallowed[1]);
  CHECK(tr.swallow_time[0] == doctest::Approx(radial_capacity(0.5)).epsilon(1e-4));
}

TEST_CASE("flow symmetries and monotone modulus") {
  const DrivingSpec d = wavy_pair();
  const std::vector<cplx> pts{cplx(0.1, 0.2), cplx(-0.6, 0.3), cplx(0.4, -0.5), cplx(0.8, 0.3)};
  const auto tr = solve_forward({}, d, pts, 0.3);

  const double alpha = 1.3;
  const cplx e = std::polar(1.0, alpha);
  DrivingSpec dr = d;
  for (auto& th : dr.theta)
    for (double& v : th) v += alpha;
  std::vector<cplx> pr;
  for (cplx p : pts) pr.push_back(e * p);
  const auto trr = solve_forward({}, dr, pr, 0.3);

  DrivingSpec dc = d;
  for (auto& th : dc.theta)
    for (double& v : th) v = -v;
  std::vector<cplx> pc;
  for (cplx p : pts) pc.push_back(std::conj(p));
  const auto trc = solve_forward({}, dc, pc, 0.3);

  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    for (std::size_t p = 0; p < pts.size(); ++p) {
      CHECK(std::abs(trr.points[i][p] - e * tr.points[i][p]) < 1e-8);
      CHECK(std::abs(trc.points[i][p] - std::conj(tr.points[i][p])) < 1e-8);
      if (i > 0) CHECK(std::abs(tr.points[i][p]) >= std::abs(tr.points[i - 1][p]));
    }
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(std::abs(trr.tips[k][i] - e * tr.tips[k][i]) < 1e-7);
      CHECK(std::abs(trc.tips[k][i] - std::conj(tr.tips[k][i])) < 1e-7);
    }
  }
}

TEST_CASE("log modulus derivative matches the kernel") {
  const DrivingSpec d = wavy_pair();
  const DrivingInterp di(d);
  const cplx z0(0.3, -0.2);
  const double t = 0.13, h = 1e-4;
  EvolutionOptions o;
  o.trace_tips = false;
  std::vector<double> g;
  for (double s : {t - h, t, t + h}) {
    DrivingSpec ds = d;
    g.push_back(std::log(std::abs(solve_forward({}, ds, std::vector<cplx>{z0}, s, o).points.back()[0])));
  }
  const cplx w = solve_forward({}, d, std::vector<cplx>{z0}, t, o).points.back()[0];
  const auto lam = di.lambda(t);
  double rate = 0.0;
  for (std::size_t k = 0; k < 2; ++k) rate += lam[k] * mobius_kernel(di.xi(k, t), w).real();
  CHECK((g[2] - g[0]) / (2 * h) == doctest::Approx(rate).epsilon(1e-5));
}

TEST_CASE("hull tracing basics") {
  const auto d = constant_driving({0.7}, {0.0, 0.3});
  const auto curves = trace_hull({}, d, 0.3);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].samples.front().z == std::polar(1.0, 0.7));
  for (const auto& s : curves[0].samples) CHECK(std::abs(std::arg(s.z) - 0.7) < 1e-9);
  CHECK_THROWS_AS(trace_hull({}, d, 0.5), Error);
}

TEST_CASE("round trip residuals") {
  HullConfig radial = testutil::single_radial(0.5, 9);
  const auto r = roundtrip_residual(radial, 17);
  CHECK(r.hausdorff[0] < 1e-3);
  CHECK(r.driving_mismatch < 1e-3);

  const HullConfig pair = testutil::symmetric_pair(0.8, 0.5, 0.4, 41, 1.0);
  const auto rp = reparametrize_capacity(pair);
  HullConfig cfg = rp.config;
  cfg.horizon = std::min(cfg.curves[0].end_time(), cfg.curves[1].end_time());
  const auto s = roundtrip_residual(cfg, 17);
  CHECK(std::abs(s.hausdorff[0] - s.hausdorff[1]) < 1e-6);
  CHECK(s.hausdorff[0] < 1e-2);

  HullConfig empty;
  const auto z = roundtrip_residual(empty);
  CHECK(z.hausdorff.empty());
  CHECK(z.driving_mismatch == 0.0);
}

TEST_CASE("multiply connected flow") {
  CircularSlitDisk one;
  one.slits.push_back({0.5, 2.5, 3.5});
  DrivingSpec d;
  d.grid = {0.0, 0.05, 0.1};
  d.theta = {{0.0, 0.02, 0.05}};
  d.lambda = {{1.0, 1.0, 1.0}};
  const std::vector<cplx> pts{cplx(-0.3, 0.0), cplx(0.3, 0.4), cplx(-0.2, -0.7)};
  CHECK_THROWS_AS(solve_forward(one, d, std::vector<cplx>{cplx(-0.5, 0.0)}, 0.1), Error);
  EvolutionOptions o;
  o.trace_tips = false;
  const auto tr = solve_forward(one, d, pts, 0.1, o);
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    CHECK(tr.domains[i].slits[0].radius > tr.domains[i - 1].slits[0].radius);
    CHECK(tr.arc_fit_residual[i] < 1e-10);
    for (std::size_t p = 0; p < pts.size(); ++p) CHECK(std::abs(tr.points[i][p]) > std::abs(tr.points[i - 1][p]));
  }
  // D_t is the canonical image of the initial domain minus the hull
  const auto curves = trace_hull(one, d, 0.1, o, tr.times);
  HullConfig cfg;
  cfg.curves = curves;
  cfg.initial_domain = one;
  cfg.horizon = 0.1;
  const auto again = extract_driving(cfg, tr.times);
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    CHECK(std::abs(std::polar(1.0, again.theta[0][i]) - tr.xi[i][0]) < 5e-3);
}
