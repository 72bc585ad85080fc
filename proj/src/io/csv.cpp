#include "kloewner/error.hpp"
#include "kloewner/io.hpp"

#include <cmath>

namespace kloewner::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : path_(path) {
  std::vector<std::string> names(header.begin(), header.end());
  this->header(names);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::span<const std::string> header) : path_(path) {
  this->header(header);
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
  if (file_) std::fclose(file_);
  file_ = nullptr;
}

void CsvWriter::header(std::span<const std::string> names) {
  file_ = std::fopen(path_.c_str(), "wb");
  if (!file_) throw Error(ErrorCode::InvalidInput, "cannot write " + path_.string());
  columns_ = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) std::fprintf(file_, i ? ",%s" : "%s", names[i].c_str());
  std::fputc('\n', file_);
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

void CsvWriter::row(std::span<const double> values) {
  if (!file_) throw Error(ErrorCode::InvalidInput, "csv writer closed: " + path_.string());
  if (values.size() != columns_) throw Error(ErrorCode::InvalidInput, "csv row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) std::fputc(',', file_);
    std::fputs(format_double(values[i]).c_str(), file_);
  }
  std::fputc('\n', file_);
}

}  // namespace kloewner::io
