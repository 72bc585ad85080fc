#include "doctest.h"
#include "kloewner/error.hpp"
#include "kloewner/verify.hpp"

using namespace kloewner;

TEST_CASE("check registry") {
  const auto& checks = verify::list_checks();
  REQUIRE(checks.size() == 12);
  for (std::size_t i = 0; i < checks.size(); ++i) CHECK(checks[i].id == "A" + std::to_string(i + 1));
  CHECK(verify::check_info("A4").fixture == "A2");
  CHECK_THROWS_AS(verify::check_info("A13"), Error);
  for (const auto& id : verify::fixture_ids()) CHECK(verify::default_fixture(id)["check"] == id);
}

TEST_CASE("fixture override drives the verdict") {
  const auto good = verify::run_check("A3");
  CHECK(good.passed);
  verify::VerifyOptions o;
  o.fixtures["A3"] = verify::perturbed_symmetry_fixture();
  const auto bad = verify::run_check("A3", o);
  CHECK_FALSE(bad.passed);
  CHECK(bad.value > bad.tolerance);
  o.fixtures["A3"] = io::json{{"check", "A3"}};
  const auto broken = verify::run_check("A3", o);
  CHECK_FALSE(broken.passed);
  CHECK(broken.detail.find("fixture") != std::string::npos);
}
