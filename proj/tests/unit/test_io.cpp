#include "doctest.h"
#include "helpers.hpp"
#include "kloewner/error.hpp"
#include "kloewner/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace kloewner;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "kloewner_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("hull config survives a JSON round trip") {
  HullConfig cfg = testutil::symmetric_pair(0.9, 0.7, 0.45, 7, 1.0);
  cfg.initial_domain.slits.push_back({0.3, 4.0, 5.5});
  const HullConfig back = io::hull_config_from_json(io::parse_json(io::to_json(cfg).dump()));
  REQUIRE(back.curves.size() == 2);
  CHECK(back.horizon == cfg.horizon);
  CHECK(back.initial_domain.slits[0].beta == 5.5);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < cfg.curves[k].samples.size(); ++i) {
      CHECK(back.curves[k].samples[i].t == cfg.curves[k].samples[i].t);
      CHECK(back.curves[k].samples[i].z == cfg.curves[k].samples[i].z);
    }
}

TEST_CASE("driving and point documents") {
  DrivingSpec d;
  d.grid = {0.0, 0.1};
  d.theta = {{0.1, 0.2}, {3.0, 3.1}};
  d.lambda = {{0.5, 0.5}, {0.5, 0.5}};
  const DrivingSpec back = io::driving_from_json(io::to_json(d));
  CHECK(back.theta == d.theta);
  CHECK(back.lambda == d.lambda);
  const auto pts = io::points_from_json(io::parse_json(R"({"points": [[0.5, -0.25], 0.125]})"));
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] == cplx(0.5, -0.25));
  CHECK(pts[1] == cplx(0.125, 0.0));
  CHECK_THROWS_AS(io::driving_from_json(io::parse_json(R"({"grid": [0]})")), Error);
}

TEST_CASE("parse errors report line and column") {
  try {
    io::parse_json("{\n  \"a\": [1,\n  2,,\n}", "doc.json");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("doc.json:3:5") != std::string::npos);
  }
}

TEST_CASE("sha256 test vectors") {
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const fs::path p = scratch("abc.txt");
  std::ofstream(p, std::ios::binary) << "abc";
  CHECK(io::sha256_file(p) == io::sha256_hex("abc"));
}

TEST_CASE("csv values round trip exactly") {
  const fs::path p = scratch("v.csv");
  const double x = 0.1 + 0.2, y = -1.0 / 3.0;
  {
    io::CsvWriter w(p, {"x", "y"});
    w.row({x, y});
    CHECK_THROWS_AS(w.row({x}), Error);
  }
  std::ifstream in(p);
  std::string head, line;
  std::getline(in, head);
  std::getline(in, line);
  CHECK(head == "x,y");
  const auto comma = line.find(',');
  CHECK(std::strtod(line.substr(0, comma).c_str(), nullptr) == x);
  CHECK(std::strtod(line.substr(comma + 1).c_str(), nullptr) == y);
}

TEST_CASE("manifest lists outputs with digests") {
  const fs::path p = scratch("out.txt");
  std::ofstream(p, std::ios::binary) << "abc";
  io::RunManifest m;
  m.command = "forward";
  m.add_output(p);
  m.failure_code = "PoleHit";
  m.failure_reason = "x";
  const auto j = m.to_json();
  CHECK(j["outputs"][0]["path"] == "out.txt");
  CHECK(j["outputs"][0]["sha256"] == io::sha256_hex("abc"));
  CHECK(j["failure"]["code"] == "PoleHit");
}
