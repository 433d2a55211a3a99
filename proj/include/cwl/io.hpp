#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace cwl {

// "CWL1" | u16 version | u16 ndim | u64 dims[ndim] | f64 LE payload | UTF-8 "key = value" metadata
struct FieldFile {
  std::vector<std::uint64_t> dims;
  std::vector<double> data;
  std::map<std::string, std::string> meta;
  std::size_t count() const;
};

constexpr std::uint16_t kFieldVersion = 1;

void write_field(const std::string& path, const FieldFile& f);
// Validates magic, version and payload length before returning any data.
FieldFile read_field(const std::string& path);

// CSV with a "# config_hash=..." line and a header row whose names carry units, e.g. "eta [1/length]".
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash, const std::vector<std::string>& columns);
  CsvWriter& row(const std::vector<double>& values);
  CsvWriter& row(const std::vector<std::string>& values);
  static std::string fmt(double v);

 private:
  std::ofstream out_;
  std::size_t ncol_;
};

}  // namespace cwl
