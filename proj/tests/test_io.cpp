#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cwl/config.hpp"
#include "cwl/io.hpp"

using namespace cwl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / "cwl_test_io";
  fs::create_directories(d);
  return d / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("field file round trip") {
  FieldFile f;
  f.dims = {3, 4};
  for (int i = 0; i < 12; ++i) f.data.push_back(0.1 * i - 1e-300 * i);
  f.meta["time"] = "1.5";
  f.meta["config_hash"] = "abc";
  auto p = scratch("rt.cwl");
  write_field(p.string(), f);
  auto g = read_field(p.string());
  CHECK(g.dims == f.dims);
  CHECK(g.data == f.data);
  CHECK(g.meta == f.meta);
  auto raw = slurp(p);
  REQUIRE(raw.size() > 4 + 2 + 2 + 16 + 96);
  CHECK(raw.substr(0, 4) == "CWL1");
  CHECK(std::uint8_t(raw[4]) == 1);  // u16 version, little endian
  CHECK(std::uint8_t(raw[6]) == 2);  // ndim
}

TEST_CASE("field file rejects corruption") {
  FieldFile f;
  f.dims = {8};
  f.data.assign(8, 1.0);
  auto p = scratch("bad.cwl");
  write_field(p.string(), f);
  auto raw = slurp(p);
  SUBCASE("bad magic") {
    raw[0] = 'X';
    std::ofstream(p, std::ios::binary) << raw;
    CHECK_THROWS(read_field(p.string()));
  }
  SUBCASE("truncated payload") {
    std::ofstream(p, std::ios::binary) << raw.substr(0, 30);
    CHECK_THROWS(read_field(p.string()));
  }
  SUBCASE("missing file") { CHECK_THROWS(read_field(scratch("nope.cwl").string())); }
}

TEST_CASE("csv carries hash and unit header") {
  auto p = scratch("t.csv");
  {
    CsvWriter w(p.string(), "deadbeef", {"eta [1/length]", "power [1]"});
    w.row(std::vector<double>{1.0, 0.25});
    CHECK_THROWS(w.row(std::vector<double>{1.0}));
  }
  std::ifstream in(p);
  std::string l1, l2, l3;
  std::getline(in, l1), std::getline(in, l2), std::getline(in, l3);
  CHECK(l1.find("deadbeef") != std::string::npos);
  CHECK(l2 == "eta [1/length],power [1]");
  CHECK(l3 == "1,0.25");
  CHECK(CsvWriter::fmt(0.1) == "0.10000000000000001");
}

TEST_CASE("config parsing") {
  auto c = Config::parse_string("[solver]\ndt = 0.01\n[experiment]\neps = 0.01, 0.02 0.03\nnx = 64\n");
  CHECK(c.get("solver.dt", 0.0) == 0.01);
  CHECK(c.get("solver.missing", 7.0) == 7.0);
  CHECK(c.get_int("experiment.nx", 0) == 64);
  CHECK(c.get_list("experiment.eps", {}) == std::vector<double>{0.01, 0.02, 0.03});
  SUBCASE("errors name the line") {
    try {
      Config::parse_string("[a]\nx = 1\nthis is not a pair\n");
      FAIL("expected rejection");
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    auto bad = Config::parse_string("[a]\nx = notanumber\n");
    CHECK_THROWS(bad.get("a.x", 0.0));
  }
  SUBCASE("hash is stable and sensitive") {
    auto c2 = Config::parse_string("[experiment]\nnx = 64\neps = 0.01, 0.02 0.03\n[solver]\ndt = 0.01\n");
    CHECK(c.hash(1) == c2.hash(1));
    CHECK(c.hash(1) != c.hash(2));
    c2.set("solver.dt", "0.02");
    CHECK(c.hash(1) != c2.hash(1));
    CHECK(c.hash(1).size() == 16);
  }
  SUBCASE("builders pick up values") {
    auto e = experiment_config(c);
    CHECK(e.grid.nx == 64);
    CHECK(e.eps[1] == 0.02);
    CHECK(e.solver.dt == 0.01);
  }
}
