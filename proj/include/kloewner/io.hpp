#pragma once

#include "kloewner/evolution.hpp"
#include "kloewner/mckernel.hpp"
#include "kloewner/scmap.hpp"
#include "kloewner/types.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kloewner::io {

using nlohmann::json;

// Parse failures carry "path:line:column" in the message.
json read_json_file(const std::filesystem::path& path);
json parse_json(std::string_view text, std::string_view origin = "<input>");
void write_json_file(const std::filesystem::path& path, const json& j);

json to_json(cplx z);
cplx complex_from_json(const json& j);

json to_json(const CircularSlitDisk& domain);
CircularSlitDisk slit_disk_from_json(const json& j);

json to_json(const HullConfig& config);
HullConfig hull_config_from_json(const json& j);

json to_json(const DrivingSpec& driving);
DrivingSpec driving_from_json(const json& j);

// Either a bare array of [re, im] pairs or {"points": [...]}.
std::vector<cplx> points_from_json(const json& j);

json to_json(const ConformalMapRep& map);
json to_json(const LaplaceSolution& u);
json to_json(const HarmonicBundle& bundle);
json to_json(const KernelField& kernel);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);
  CsvWriter(const std::filesystem::path& path, std::span<const std::string> header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::initializer_list<double> values);
  void row(std::span<const double> values);
  void close();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::size_t columns_ = 0;
  void header(std::span<const std::string> names);
};

// Shortest text that round-trips a double (%.17g).
std::string format_double(double x);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
  json tolerances = json::object();
  json versions = json::object();
  json summary = json::object();
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
  std::vector<std::string> flags;
  double wall_clock = 0.0;
  int exit_code = 0;
  std::string failure_code;
  std::string failure_reason;

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  json to_json() const;
  void write(const std::filesystem::path& path) const;
};

std::string library_version();

}  // namespace kloewner::io
