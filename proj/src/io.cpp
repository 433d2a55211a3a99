#include "cwl/io.hpp"

#include <bit>
#include <cstring>
#include <iterator>

#include "cwl/spectral.hpp"

namespace cwl {

static_assert(std::endian::native == std::endian::little, "FieldFile I/O assumes a little-endian host");

std::size_t FieldFile::count() const {
  std::size_t n = dims.empty() ? 0 : 1;
  for (auto d : dims) n *= d;
  return n;
}

void write_field(const std::string& path, const FieldFile& f) {
  if (f.dims.empty() || f.dims.size() > 65535) throw Rejected("write_field: bad rank");
  if (f.data.size() != f.count()) throw Rejected("write_field: payload does not match dims");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Rejected("write_field: cannot open " + path);
  out.write("CWL1", 4);
  std::uint16_t ver = kFieldVersion, nd = std::uint16_t(f.dims.size());
  out.write(reinterpret_cast<const char*>(&ver), 2);
  out.write(reinterpret_cast<const char*>(&nd), 2);
  out.write(reinterpret_cast<const char*>(f.dims.data()), std::streamsize(8 * f.dims.size()));
  out.write(reinterpret_cast<const char*>(f.data.data()), std::streamsize(8 * f.data.size()));
  for (const auto& [k, v] : f.meta) out << k << " = " << v << "\n";
  if (!out) throw Rejected("write_field: write failed for " + path);
}

FieldFile read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Rejected("read_field: cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CWL1", 4) != 0) throw Rejected("read_field: bad magic in " + path);
  std::uint16_t ver = 0, nd = 0;
  in.read(reinterpret_cast<char*>(&ver), 2);
  in.read(reinterpret_cast<char*>(&nd), 2);
  if (!in || ver != kFieldVersion) throw Rejected("read_field: unsupported version in " + path);
  if (nd == 0) throw Rejected("read_field: zero rank in " + path);
  FieldFile f;
  f.dims.resize(nd);
  in.read(reinterpret_cast<char*>(f.dims.data()), std::streamsize(8 * nd));
  if (!in) throw Rejected("read_field: truncated header in " + path);
  const std::size_t n = f.count();
  in.seekg(0, std::ios::end);
  const auto end = std::size_t(in.tellg());
  const std::size_t head = 8 + 8 * std::size_t(nd);
  if (n > (end - head) / 8) throw Rejected("read_field: payload shorter than dims in " + path);
  in.seekg(std::streamoff(head));
  f.data.resize(n);
  in.read(reinterpret_cast<char*>(f.data.data()), std::streamsize(8 * n));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    auto eq = line.find(" = ");
    if (eq != std::string::npos) f.meta[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return f;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash, const std::vector<std::string>& columns)
    : out_(path), ncol_(columns.size()) {
  if (!out_) throw Rejected("CsvWriter: cannot open " + path);
  out_ << "# config_hash=" << config_hash << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

std::string CsvWriter::fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  for (double v : values) s.push_back(fmt(v));
  return row(s);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() != ncol_) throw Rejected("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
  out_ << "\n";
  return *this;
}

}  // namespace cwl
