#include "doctest.h"
#include "helpers.hpp"
#include "kloewner/error.hpp"
#include "kloewner/types.hpp"

using namespace kloewner;

namespace {

ErrorCode code_of(const HullConfig& cfg) {
  try {
    validate_hull_config(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

HullConfig two_point(cplx a, cplx b) {
  HullConfig cfg;
  cfg.curves.push_back({0, {{0.0, a}, {1.0, b}}});
  cfg.horizon = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("radial polyline validates and validation is idempotent") {
  const HullConfig cfg = two_point({1.0, 0.0}, {0.5, 0.0});
  const HullConfig& out = validate_hull_config(cfg);
  CHECK(&out == &cfg);
  CHECK_NOTHROW(validate_hull_config(validate_hull_config(cfg)));
}

TEST_CASE("validation errors name the violated invariant") {
  CHECK(code_of(two_point({0.9, 0.0}, {0.5, 0.0})) == ErrorCode::BaseNotOnCircle);
  CHECK(code_of(two_point({1.0, 0.0}, {-0.5, 0.0})) == ErrorCode::OriginHit);

  HullConfig cfg = two_point({1.0, 0.0}, {0.5, 0.0});
  cfg.curves.push_back({1, {{0.0, {0.0, 1.0}}, {0.5, {0.5, 0.0}}, {1.0, {0.4, -0.2}}}});
  try {
    validate_hull_config(cfg);
    FAIL("expected CurvesIntersect");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CurvesIntersect);
    CHECK(e.curve() == 1);
    CHECK(e.sample() == 1);
  }

  HullConfig mono = two_point({1.0, 0.0}, {0.5, 0.0});
  mono.curves[0].samples.push_back({0.5, {0.4, 0.0}});
  CHECK(code_of(mono) == ErrorCode::NonMonotoneTimes);

  HullConfig self;
  self.horizon = 1.0;
  self.curves.push_back({0, {{0.0, {1.0, 0.0}}, {0.25, {0.5, 0.0}}, {0.5, {0.5, 0.3}},
                             {0.75, {0.7, 0.3}}, {1.0, {0.7, -0.1}}}});
  CHECK(code_of(self) == ErrorCode::SelfIntersection);

  HullConfig fold;
  fold.horizon = 1.0;
  fold.curves.push_back({0, {{0.0, {1.0, 0.0}}, {0.5, {0.5, 0.0}}, {1.0, {0.7, 0.0}}}});
  CHECK(code_of(fold) == ErrorCode::SelfIntersection);
}

TEST_CASE("curves may not cross initial slits") {
  HullConfig cfg = two_point({1.0, 0.0}, {0.3, 0.0});
  cfg.initial_domain.slits.push_back({0.5, -0.2, 0.2});
  CHECK(code_of(cfg) == ErrorCode::CurvesIntersect);
  cfg.initial_domain.slits[0] = {0.5, 0.3, 1.0};
  CHECK_NOTHROW(validate_hull_config(cfg));
}

TEST_CASE("sample_curve interpolates linearly and rejects out-of-range times") {
  SlitCurve c{0, {{0.0, {1.0, 0.0}}, {2.0, {0.5, 0.2}}}};
  CHECK(sample_curve(c, 0.0) == cplx(1.0, 0.0));
  const cplx mid = sample_curve(c, 1.0);
  CHECK(mid.real() == doctest::Approx(0.75));
  CHECK(mid.imag() == doctest::Approx(0.1));
  CHECK_THROWS_AS(sample_curve(c, 2.5), Error);
  const double h = 1e-3;
  CHECK(std::abs(sample_curve(c, 1.0 + h) - mid) <= h * std::abs(c.samples[1].z - c.samples[0].z) / 2.0 + 1e-15);
}

TEST_CASE("partition norm") {
  CHECK(partition_norm(Partition{{0.0, 0.5, 1.0}}) == doctest::Approx(0.5));
  CHECK(partition_norm(Partition::uniform(0.0, 1.0, 11)) == doctest::Approx(0.1));
  CHECK_THROWS_AS(partition_norm(Partition{{0.0}}), Error);
  const Partition p{{0.0, 0.3, 1.0}};
  CHECK(partition_norm(p.refined()) <= partition_norm(p));
}

TEST_CASE("driving validation") {
  DrivingSpec d;
  d.grid = {0.0, 1.0};
  d.theta = {{0.0, 0.1}, {1.0, 1.1}};
  d.lambda = {{0.5, 0.4}, {0.5, 0.6}};
  CHECK_NOTHROW(validate_driving(d));
  d.lambda[1][1] = 0.4;
  CHECK_THROWS_AS(validate_driving(d), Error);
  d.lambda[1][1] = 0.6;
  d.theta[1][0] = kTwoPi;
  CHECK_THROWS_AS(validate_driving(d), Error);
}

TEST_CASE("angles") {
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  const std::vector<double> raw{3.0, -3.0, 3.1};
  const auto u = unwrap_angles(raw);
  CHECK(u[1] == doctest::Approx(-3.0 + kTwoPi));
  CHECK(u[2] == doctest::Approx(3.1));
}

TEST_CASE("annular sector") {
  const AnnularSector a = AnnularSector::around({0.0, 1.0}, 0.1);
  CHECK(a.contains(std::polar(0.95, kPi / 2)));
  CHECK_FALSE(a.contains(std::polar(0.85, kPi / 2)));
  CHECK_FALSE(a.contains(std::polar(0.95, kPi / 2 + 0.4)));
  for (cplx z : a.sample(4, 5)) CHECK(a.contains(z, 1e-12));
}
