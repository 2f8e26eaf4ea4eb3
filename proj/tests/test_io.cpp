#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stripwall/io.hpp>
#include <stripwall/micro.hpp>

#include <fstream>

#include "test_util.hpp"

using namespace stripwall;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("stripwall_io_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("format17 round-trips doubles") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 200; ++t) {
    const double v = u(rng) * std::pow(10.0, t % 20 - 10);
    CHECK(std::stod(format17(v)) == v);
  }
  CHECK(std::stod(format17(0.1)) == 0.1);
}

TEST_CASE("field CSV round-trips bit-identically") {
  TempDir dir;
  std::mt19937_64 rng(1);
  const StripGrid g = build_grid(3.5, 29, 9);
  const ScalarField f = test::wavy_wall(g, rng, 0.01);
  const fs::path csv = dir.path / "f.csv";
  write_field(csv, f);
  CHECK(fs::exists(sidecar_path(csv)));
  const ScalarField back = read_field(csv);
  CHECK(back.grid == f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(back.values[i] == f.values[i]);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y,theta");
}

TEST_CASE("trace CSV round-trips bit-identically") {
  TempDir dir;
  const Trace t = sample_trace(-2.0, 3.0, 51, [](double x) { return std::atan(x) / 3.0; });
  write_trace(dir.path / "t.csv", t);
  const Trace b = read_trace(dir.path / "t.csv");
  REQUIRE(b.size() == t.size());
  CHECK(b.x0 == t.x0);
  CHECK(b.spacing == t.spacing);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(b.values[i] == t.values[i]);
}

TEST_CASE("trend CSV") {
  TempDir dir;
  TrendTable t;
  t.rows.push_back({0.1, 3.9, 0.1, 0.2, true});
  write_trend_csv(dir.path / "trend.csv", t);
  std::ifstream in(dir.path / "trend.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "eps,energy_eps,energy_gap,h1_distance");
  CHECK(row.rfind("0.1", 0) == 0);
}

TEST_CASE("read errors") {
  TempDir dir;
  CHECK_THROWS_AS(read_field(dir.path / "missing.csv"), std::runtime_error);
  {
    std::ofstream out(dir.path / "bad.csv");
    out << "a,b\n1,2\n";
  }
  CHECK_THROWS_AS(read_trace(dir.path / "bad.csv"), std::runtime_error);
  const StripGrid g = build_grid(1.0, 3, 3);
  write_field(dir.path / "f.csv", ScalarField(g, 1.0));
  {
    std::ofstream out(dir.path / "f.csv", std::ios::app);
    out << "0,0,1\n";
  }
  CHECK_THROWS_AS(read_field(dir.path / "f.csv"), std::runtime_error);
}

TEST_CASE("energy JSON round-trip") {
  EnergyBreakdown e{1.0 / 3.0, 0.25, 2.0 / 7.0, 0.0, 0.0};
  e.total = e.dirichlet + e.zeeman + e.boundary;
  const EnergyBreakdown b = energy_from_json(to_json(e));
  CHECK(b.dirichlet == e.dirichlet);
  CHECK(b.boundary == e.boundary);
  CHECK(b.total == e.total);
}
