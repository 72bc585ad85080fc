#include "doctest.h"
#include "helpers.hpp"
#include "kloewner/capacity.hpp"
#include "kloewner/error.hpp"
#include "kloewner/mc_hull.hpp"
#include "kloewner/mckernel.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace kloewner;

namespace {

CircularSlitDisk one_slit() {
  CircularSlitDisk d;
  d.slits.push_back({0.5, 0.2, 1.4});
  return d;
}

CircularSlitDisk three_slits() {
  CircularSlitDisk d;
  d.slits = {{0.5, 0.2, 1.4}, {0.7, 2.5, 3.5}, {0.3, 4.0, 5.5}};
  return d;
}

LaplaceDomain annulus(double rho) {
  LaplaceDomain d;
  d.holes.push_back(Hole::circle(0.0, rho));
  return d;
}

}  // namespace

TEST_CASE("constant boundary data gives a constant") {
  const auto dom = LaplaceDomain::from_slit_disk(three_slits());
  const auto u = solve_dirichlet(dom, [](cplx, int) { return 2.5; });
  CHECK(u.residual < 1e-12);
  for (cplx z : {cplx(0.0, 0.0), cplx(0.3, -0.2), cplx(-0.6, 0.1)}) CHECK(u.value(z) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("annulus harmonic measure and period") {
  const double rho = 0.5;
  const auto b = harmonic_bundle(annulus(rho));
  REQUIRE(b.size() == 1);
  for (double r : {0.55, 0.7, 0.95})
    for (int i = 0; i < 6; ++i) {
      const cplx z = std::polar(r, 1.1 * i);
      CHECK(std::abs(b.omega[0].value(z) - std::log(r) / std::log(rho)) < 1e-9);
    }
  const double exact = kTwoPi / std::log(1.0 / rho);
  CHECK(b.period(0, 0) == doctest::Approx(exact).epsilon(1e-10));
  CHECK(period_by_contour(b.omega[0], 0) == doctest::Approx(exact).epsilon(1e-8));
  CHECK(b.omega[0].residual <= 3.0 * std::max(b.omega[0].fit_residual, 1e-15));
}

TEST_CASE("underdetermined fit is ill conditioned") {
  LaplaceOptions o;
  o.poly_degree = 20;
  o.hole_degree = 20;
  o.max_points_per_component = 10;
  CHECK_THROWS_AS(solve_dirichlet(LaplaceDomain::from_slit_disk(one_slit()), [](cplx, int) { return 0.0; }, o), Error);
  try {
    solve_dirichlet(LaplaceDomain::from_slit_disk(one_slit()), [](cplx, int) { return 0.0; }, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditioned);
  }
}

TEST_CASE("disk Green function") {
  const LaplaceDomain disk;
  const cplx a(0.3, -0.4);
  const auto g = green(disk, a);
  for (cplx z : {cplx(0.0, 0.0), cplx(-0.5, 0.5), cplx(0.8, 0.1)}) {
    const double exact = -std::log(std::abs((z - a) / (1.0 - std::conj(a) * z)));
    CHECK(std::abs(g.value(z) - exact) < 1e-9);
  }
  CHECK(green(disk, 0.0).value(0.5) == doctest::Approx(-std::log(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(green(disk, cplx(1.2, 0.0)), Error);
}

TEST_CASE("Green function symmetry on a slit domain") {
  const auto dom = LaplaceDomain::from_slit_disk(three_slits());
  const std::vector<cplx> pts{cplx(0.1, 0.1), cplx(-0.4, -0.3), cplx(0.2, -0.75), cplx(0.85, 0.2)};
  std::vector<GreenFunction> gs;
  for (cplx p : pts) gs.push_back(green(dom, p));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double gij = gs[i].value(pts[j]);
      CHECK(gij > 0.0);
      CHECK(std::abs(gij - gs[j].value(pts[i])) < 1e-5);
    }
}

TEST_CASE("harmonic bundle structure") {
  CHECK(harmonic_bundle(CircularSlitDisk{}).size() == 0);
  const auto b = harmonic_bundle(three_slits());
  REQUIRE(b.size() == 3);
  CHECK(b.asymmetry < 1e-6);
  CHECK(b.contour_mismatch < 1e-5);
  CHECK(b.eigenvalues.minCoeff() > 0.0);
  CHECK(b.condition >= 1.0);
  // row sums of P give the flux of ω_1+…+ω_n, which is the negative outer flux of 1 − Σω
  const Eigen::VectorXd x = b.solve_period(b.period.col(1));
  CHECK(std::abs(x[1] - 1.0) < 1e-12);
  for (cplx z : {cplx(0.0, 0.0), cplx(0.45, 0.45), cplx(-0.2, -0.6)}) {
    double sum = 0.0;
    for (const auto& w : b.omega) {
      const double v = w.value(z);
      CHECK(v > -1e-8);
      CHECK(v < 1.0 + 1e-8);
      sum += v;
    }
    CHECK(sum < 1.0);
  }
}

TEST_CASE("plain disk kernel is the Moebius kernel") {
  const cplx zeta = std::polar(1.0, 0.3);
  const auto k = phi_kernel(CircularSlitDisk{}, zeta);
  double err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const cplx z = std::polar(0.9, kTwoPi * i / 200.0);
    err = std::max(err, std::abs(k(z) - (zeta + z) / (zeta - z)));
  }
  CHECK(err < 1e-6);
  CHECK(k(0.0) == cplx(1.0, 0.0));
  CHECK_THROWS_AS(k(zeta * (1.0 - 1e-9)), Error);
}

TEST_CASE("one slit kernel maps onto a slit half plane") {
  const cplx zeta = std::polar(1.0, 0.3);
  const auto k = phi_kernel(one_slit(), zeta);
  CHECK(std::abs(k(0.0) - 1.0) < 1e-15);
  CHECK(std::abs(k.raw_origin - 1.0) < 1e-6);
  double circle = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double th = 0.4 + (kTwoPi - 0.2) * i / 399.0;
    circle = std::max(circle, std::abs(k(std::polar(1.0, th)).real()));
  }
  CHECK(circle < 1e-4);
  std::vector<double> vals;
  for (int i = 0; i < 200; ++i) {
    const double th = 0.2 + 1.2 * (i + 0.5) / 200.0;
    for (double s : {1.0 + 1e-10, 1.0 - 1e-10}) vals.push_back(k(std::polar(0.5 * s, th)).real());
  }
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / double(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  CHECK(std::sqrt(var / double(vals.size())) < 1e-4 * std::abs(mean));
  CHECK(mean == doctest::Approx(k.slit_values[0]).epsilon(1e-4));
  for (cplx z : {cplx(0.2, 0.3), cplx(-0.7, 0.0), cplx(0.1, -0.9), cplx(0.5, 0.5)}) {
    CHECK(k(z).real() > 0.0);
    const double h = 1e-6;
    const cplx fd = (k(z + h) - k(z - h)) / (2.0 * h);
    CHECK(std::abs(fd - k.derivative(z)) < 1e-6 * std::abs(fd) + 1e-7);
  }
}

TEST_CASE("kernel rotation equivariance and shared systems") {
  const double alpha = 0.9;
  CircularSlitDisk rot = one_slit();
  for (auto& s : rot.slits) {
    s.alpha += alpha;
    s.beta += alpha;
  }
  const cplx zeta = std::polar(1.0, -1.0);
  const cplx e = std::polar(1.0, alpha);
  const auto k0 = phi_kernel(one_slit(), zeta);
  const auto k1 = phi_kernel(rot, e * zeta);
  const auto dom = LaplaceDomain::from_slit_disk(one_slit());
  const cplx zs[2] = {std::polar(1.0, 2.0), zeta};
  const auto both = phi_kernels(dom, zs);
  for (cplx z : {cplx(0.2, 0.3), cplx(-0.7, 0.0), cplx(0.1, -0.9)}) {
    CHECK(std::abs(k1(e * z) - k0(z)) < 1e-6);
    CHECK(std::abs(both[1](z) - k0(z)) < 1e-12);
  }
}

TEST_CASE("canonical map fixed points") {
  const auto id = canonical_slit_disk_map(CircularSlitDisk{}, 0.0);
  CHECK(std::abs(id(cplx(0.3, 0.4)) - cplx(0.3, 0.4)) < 1e-12);
  CHECK(id.image.is_disk());

  const cplx a(0.2, -0.3);
  const auto mob = canonical_slit_disk_map(CircularSlitDisk{}, a);
  for (cplx z : {cplx(0.0, 0.0), cplx(-0.5, 0.5)}) {
    const cplx w = (z - a) / (1.0 - std::conj(a) * z);
    const cplx d = 1.0 / (1.0 - std::norm(a));
    CHECK(std::abs(mob(z) - w * std::abs(d) / d) < 1e-9);
  }
  CHECK(mob.lmr == doctest::Approx(-std::log(1.0 - std::norm(a))).epsilon(1e-9));

  const auto sd = three_slits();
  const auto m = canonical_slit_disk_map(sd, 0.0);
  CHECK(std::abs(m.lmr) < 1e-8);
  CHECK(m.residual < 1e-6);
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.6)}) CHECK(std::abs(m(z) - z) < 1e-7);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(m.image.slits[j].radius == doctest::Approx(sd.slits[j].radius).epsilon(1e-8));
    CHECK(std::abs(m.image.slits[j].alpha - sd.slits[j].alpha) < 1e-6);
    CHECK(std::abs(m.image.slits[j].beta - sd.slits[j].beta) < 1e-6);
  }
}

TEST_CASE("disk minus a small disk maps onto a slit disk") {
  LaplaceDomain dom;
  dom.holes.push_back(Hole::circle(cplx(0.3, 0.2), 0.15));
  const auto m = canonical_slit_disk_map(dom, 0.0);
  CHECK(std::abs(m(0.0)) < 1e-15);
  CHECK(std::abs(m.derivative(0.0).imag()) < 1e-12);
  CHECK(m.derivative(0.0).real() > 0.0);
  CHECK(std::log(m.derivative(0.0).real()) == doctest::Approx(m.lmr).epsilon(1e-10));
  double lo = 1e9, hi = 0.0;
  for (int i = 0; i < 256; ++i) {
    const double r = std::abs(m(cplx(0.3, 0.2) + std::polar(0.15, kTwoPi * i / 256.0)));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi - lo < 1e-5);
  CHECK(lo == doctest::Approx(m.radii[0]).epsilon(1e-5));
  for (int i = 0; i < 64; ++i) CHECK(std::abs(std::abs(m(std::polar(1.0, kTwoPi * i / 64.0))) - 1.0) < 1e-6);
  REQUIRE(m.image.slits.size() == 1);
  CHECK(m.image.slits[0].beta > m.image.slits[0].alpha);
}

TEST_CASE("multiply connected lmr oracle") {
  HullConfig cfg;
  cfg.curves.push_back(testutil::bent_curve(0.0, 0.3, 0.3, 31, 0.3));
  cfg.horizon = 0.3;
  cfg.initial_domain.slits.push_back({0.5, 2.5, 3.5});
  const double with_slit = lmr_f(cfg, 0, 0.3, 0.3);
  HullConfig tiny = cfg;
  tiny.initial_domain.slits[0] = {0.5, 2.9999, 3.0001};
  HullConfig plain = cfg;
  plain.initial_domain.slits.clear();
  CHECK(std::abs(lmr_f(tiny, 0, 0.3, 0.3) - lmr_f(plain, 0, 0.3, 0.3)) < 1e-7);
  CHECK(with_slit > lmr_f(plain, 0, 0.3, 0.3));
  const double t0 = 0.1, t1 = 0.25;
  Partition z = Partition::uniform(t0, t1, 4);
  CHECK(partition_sum(cfg, 0, t0, t1, z) == doctest::Approx(lmr_f(cfg, 0, t1, t1) - lmr_f(cfg, 0, t0, t0)).epsilon(1e-9));
}

TEST_CASE("weights agree before and after the canonical reduction") {
  const cplx hc(-0.4, 0.1);
  const double hr = 0.15;
  HullConfig cfg;
  cfg.curves.push_back(testutil::bent_curve(0.2, 0.6, 0.3, 121, 0.3, 0));
  cfg.curves.push_back(testutil::bent_curve(-1.0, -0.4, 0.25, 121, 0.3, 1));
  cfg.horizon = 0.3;
  auto geo = std::make_shared<const HullGeometry>(HullGeometry::build(cfg));
  const auto direct = make_mc_oracle(geo, {HoleTemplate::from_circle(hc, hr)});
  const std::vector<double> grid{0.1, 0.2};
  const auto wd = weights(geo, *direct, grid);

  LaplaceDomain dom;
  dom.holes.push_back(Hole::circle(hc, hr));
  const auto h = canonical_slit_disk_map(dom, 0.0);
  HullConfig red = cfg;
  red.initial_domain = h.image;
  for (auto& c : red.curves) {
    for (auto& s : c.samples) s.z = h(s.z);
    c.samples[0].z /= std::abs(c.samples[0].z);
  }
  const auto wr = weights(red, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(wd.lambda[k][i] - wr.lambda[k][i]) < 1e-5);
  CHECK(wd.lmr[0] - wr.lmr[0] == doctest::Approx(h.lmr).epsilon(1e-6));
}
