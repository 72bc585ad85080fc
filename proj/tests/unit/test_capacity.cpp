#include "doctest.h"
#include "helpers.hpp"
#include "kloewner/capacity.hpp"
#include "kloewner/error.hpp"

#include <cmath>
#include <vector>

using namespace kloewner;
using testutil::radial_capacity;

namespace {

HullConfig single_bent() {
  HullConfig cfg;
  cfg.curves.push_back(testutil::bent_curve(0.4, 0.9, 0.5, 30, 1.0));
  cfg.horizon = 1.0;
  return cfg;
}

HullConfig bent_pair() {
  HullConfig cfg;
  cfg.curves.push_back(testutil::bent_curve(0.3, 0.8, 0.45, 30, 1.0, 0));
  cfg.curves.push_back(testutil::bent_curve(2.4, -0.6, 0.4, 24, 1.0, 1));
  cfg.horizon = 1.0;
  return cfg;
}

double lmr_g(const HullConfig& cfg, double t) {
  std::vector<double> tr(cfg.curves.size(), t);
  return lmr(build_hull_map(cfg, tr));
}

}  // namespace

TEST_CASE("single slit partition sums telescope") {
  const HullConfig cfg = single_bent();
  const double a = 0.13, b = 0.71;
  const double expect = lmr_g(cfg, b) - lmr_g(cfg, a);
  for (std::size_t n : {2u, 3u, 7u, 33u}) {
    const double s = partition_sum(cfg, 0, a, b, Partition::uniform(a, b, n));
    CHECK(std::abs(s - expect) < 1e-10);
  }
  Partition odd{{a, 0.2, 0.21, 0.5, b}};
  CHECK(std::abs(partition_sum(cfg, 0, a, b, odd) - expect) < 1e-10);
}

TEST_CASE("two-knot partition sum is the defining difference") {
  const HullConfig cfg = bent_pair();
  const double a = 0.2, b = 0.45;
  const double s = partition_sum(cfg, 1, a, b, Partition{{a, b}});
  CHECK(s == doctest::Approx(lmr_f(cfg, 1, b, a) - lmr_f(cfg, 1, a, a)).epsilon(1e-7));
}

TEST_CASE("partition sums are bounded and settle under refinement") {
  const HullConfig cfg = bent_pair();
  const double a = 0.1, b = 0.9;
  const double bound = lmr_g(cfg, b) - lmr_g(cfg, a);
  double prev_gap = 1.0, prev = 0.0;
  Partition z{{a, b}};
  for (int level = 0; level < 6; ++level) {
    const double s0 = partition_sum(cfg, 0, a, b, z);
    const double s1 = partition_sum(cfg, 1, a, b, z);
    CHECK(s0 > 0.0);
    CHECK(s1 > 0.0);
    CHECK(s0 <= bound + 1e-12);
    CHECK(s1 <= bound + 1e-12);
    if (level > 0) {
      const double gap = std::abs(s0 - prev);
      if (level > 1) CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    prev = s0;
    z = z.refined();
  }
}

TEST_CASE("partition sum input errors") {
  const HullConfig cfg = bent_pair();
  CHECK_THROWS_AS(partition_sum(cfg, 0, 0.1, 0.5, Partition{{0.1}}), Error);
  CHECK_THROWS_AS(partition_sum(cfg, 0, 0.1, 0.5, Partition{{0.1, 0.4}}), Error);
  CHECK_THROWS_AS(partition_sum(cfg, 2, 0.1, 0.5, Partition{{0.1, 0.5}}), Error);
  CHECK_THROWS_AS(partition_sum(cfg, 0, 0.1, 1.5, Partition{{0.1, 1.5}}), Error);
}

TEST_CASE("single slit capacity profile equals lmr") {
  const HullConfig cfg = single_bent();
  const std::vector<double> grid{0.1, 0.25, 0.5, 1.0};
  const CapacityProfile p = capacity_profile(cfg, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(p.c[0][i] - lmr_g(cfg, grid[i])) < 1e-12);
    CHECK(std::abs(p.lmr[i] - lmr_g(cfg, grid[i])) < 1e-12);
  }
  for (const auto& lvl : p.raw_levels) CHECK(std::abs(lvl[grid.size()] - p.c[0].back()) < 1e-12);
  CHECK(p.monotone);
}

TEST_CASE("capacity profile of a two-slit hull") {
  const HullConfig cfg = reparametrize_capacity(bent_pair()).config;
  const double T = cfg.horizon;
  const std::vector<double> grid{0.25 * T, 0.5 * T, 0.75 * T, T};
  CapacityOptions opts;
  opts.tol = 1e-6;
  const CapacityProfile p = capacity_profile(cfg, grid, opts);
  CHECK(p.monotone);
  CHECK(p.final_norm > 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(p.c[0][i] + p.c[1][i] - grid[i]) < 1e-4);
    CHECK(p.cauchy_gap[i] < opts.tol);
    CHECK(p.c[0][i] > 0.0);
    CHECK(std::abs(p.lambda[0][i] + p.lambda[1][i] - 1.0) < 5e-2);
  }
}

TEST_CASE("symmetric pair shares capacity equally") {
  const HullConfig cfg = reparametrize_capacity(testutil::symmetric_pair(0.9, 0.7, 0.45, 40, 1.0)).config;
  const double T = cfg.horizon;
  const std::vector<double> grid{0.3 * T, 0.6 * T, T};
  const CapacityProfile p = capacity_profile(cfg, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(p.c[0][i] - p.c[1][i]) < 1e-6);
    CHECK(std::abs(p.c[0][i] - 0.5 * grid[i]) < 1e-4);
  }
  std::vector<double> knots;
  for (std::size_t i = 10; i < 40; i += 10) knots.push_back(cfg.curves[0].samples[i].t);
  const WeightEstimate w = weights(cfg, knots);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    CHECK(std::abs(w.lambda[0][i] - 0.5) < 1e-3);
    CHECK(std::abs(w.lambda[1][i] - 0.5) < 1e-3);
    CHECK(std::abs(w.sum_lambda[i] - 1.0) < 1e-3);
  }
}

TEST_CASE("single slit weight is one under capacity parametrisation") {
  const HullConfig cfg = reparametrize_capacity(single_bent()).config;
  std::vector<double> knots;
  for (std::size_t i = 6; i < 30; i += 6) knots.push_back(cfg.curves[0].samples[i].t);
  const WeightEstimate w = weights(cfg, knots);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    CHECK(std::abs(w.lambda[0][i] - 1.0) < 1e-3);
    CHECK(w.h[i] > 0.0);
    CHECK(std::abs(w.lmr[i] - knots[i]) < 1e-10);
  }
  // endpoints fall back to one-sided quotients
  const std::vector<double> ends{0.0, cfg.horizon};
  const WeightEstimate e = weights(cfg, ends);
  CHECK(std::isnan(e.left[0][0]));
  CHECK(std::isnan(e.right[0][1]));
  CHECK(e.lambda[0][0] > 0.0);
}

TEST_CASE("ratio diagnostic identities") {
  const HullConfig one = single_bent();
  CHECK(ratio_diagnostic(one, 0, 0.2, 0.3, 0.1, 0.6) == 1.0);
  const HullConfig two = bent_pair();
  CHECK(ratio_diagnostic(two, 0, 0.2, 0.3, 0.4, 0.4) == 1.0);
  const double r = ratio_diagnostic(two, 0, 0.5, 0.55, 0.5, 0.55);
  CHECK(std::abs(r - 1.0) < 0.05);
  CHECK_THROWS_AS(ratio_diagnostic(two, 0, 0.3, 0.3, 0.4, 0.5), Error);
  CHECK_THROWS_AS(ratio_diagnostic(two, 0, 0.3, 0.4, 0.5, 0.4), Error);
}

TEST_CASE("ratio deviation shrinks with the window") {
  const HullConfig cfg = bent_pair();
  double prev = 1.0;
  for (double d : {0.1, 0.05, 0.025}) {
    const double dev = std::abs(ratio_diagnostic(cfg, 0, 0.5, 0.5 + d, 0.5, 0.5 + d) - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("radial reparametrisation recovers the capacity law") {
  HullConfig cfg;
  SlitCurve c;
  for (int i = 0; i < 9; ++i) {
    const double r = 1.0 - 0.75 * i / 8.0;
    c.samples.push_back({0.1 * i, cplx(r, 0.0)});
  }
  cfg.curves.push_back(c);
  cfg.horizon = 0.8;
  const double target = std::log(4.0 / 3.0);
  const std::vector<double> targets{target};
  const ReparamResult res = reparametrize_capacity(cfg, {}, targets);
  CHECK(res.inserted == 1);
  CHECK(res.max_knot_error < 1e-10);
  CHECK(std::abs(std::abs(sample_curve(res.config.curves[0], target)) - 1.0 / 3.0) < 1e-10);
  CHECK(res.config.horizon == doctest::Approx(radial_capacity(0.25)).epsilon(1e-10));
  for (const auto& s : res.config.curves[0].samples) {
    if (s.t > 0.0) CHECK(std::abs(s.t - radial_capacity(std::abs(s.z))) < 1e-10);
  }
}

TEST_CASE("reparametrisation is a fixed point on capacity times") {
  const HullConfig cfg = testutil::single_radial(0.4, 7);
  const ReparamResult res = reparametrize_capacity(cfg);
  REQUIRE(res.config.curves[0].samples.size() == cfg.curves[0].samples.size());
  for (std::size_t i = 0; i < cfg.curves[0].samples.size(); ++i) {
    CHECK(std::abs(res.config.curves[0].samples[i].t - cfg.curves[0].samples[i].t) < 1e-10);
  }
  const HullConfig two = bent_pair();
  const ReparamResult r2 = reparametrize_capacity(two);
  CHECK(r2.config.horizon == doctest::Approx(lmr_g(two, two.horizon)).epsilon(1e-5));
  CHECK(r2.max_knot_error < 1e-10);
}
