#pragma once

#include "kloewner/io.hpp"

#include <map>
#include <string>
#include <vector>

namespace kloewner::verify {

struct CheckInfo {
  std::string id;
  std::string name;
  // Fixture document the check reads ("A4" reads the "A2" fixture).
  std::string fixture;
};

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  int threads = 1;
  // Keyed by fixture id; replaces the built-in document.
  std::map<std::string, io::json> fixtures;
};

const std::vector<CheckInfo>& list_checks();
const CheckInfo& check_info(const std::string& id);

// Built-in fixture documents; each carries "check": <fixture id>.
io::json default_fixture(const std::string& fixture_id);
std::vector<std::string> fixture_ids();
// A3 document with the mirror symmetry broken.
io::json perturbed_symmetry_fixture();

CheckResult run_check(const std::string& id, const VerifyOptions& opts = {});
std::vector<CheckResult> run_suite(const std::vector<std::string>& ids, const VerifyOptions& opts = {});

std::string format_result(const CheckResult& r);
io::json to_json(const CheckResult& r);

}  // namespace kloewner::verify
