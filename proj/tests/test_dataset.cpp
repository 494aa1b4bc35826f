#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "snowtrend/dataset.hpp"

using namespace snowtrend;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("snowtrend-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& sub) const { return (path / sub).string(); }
  static inline int counter = 0;
};

GridField sample_field() {
  GeoGrid g;
  g.lat_start = -43.75;
  g.lon_start = 1.25;
  g.dlat = 2.5;
  g.dlon = 2.5;
  g.nlat = 36;
  g.nlon = 144;
  GridField f =
      make_field(g, {Date(1979, 1, 1), Date(1979, 1, 2)}, "K", "wet_bulb");
  for (std::size_t p = 0; p < f.values.size(); ++p)
    f.values[p] = static_cast<float>(p) * 0.25f - 100.0f;
  f.at(0, 3, 7) = std::numeric_limits<float>::quiet_NaN();
  return f;
}

}  // namespace

TEST_CASE("dataset round trip is bit exact") {
  TempDir tmp;
  const GridField f = sample_field();
  write_dataset(f, tmp.str("ds"));
  const GridField g = read_dataset(tmp.str("ds"));

  CHECK(g.grid == f.grid);
  CHECK(g.times == f.times);
  CHECK(g.units == f.units);
  CHECK(g.variable == f.variable);
  REQUIRE(g.values.size() == f.values.size());
  for (std::size_t p = 0; p < f.values.size(); ++p) {
    if (std::isnan(f.values[p]))
      CHECK(std::isnan(g.values[p]));
    else
      CHECK(g.values[p] == f.values[p]);
  }
}

TEST_CASE("rewriting a dataset leaves no temp files") {
  TempDir tmp;
  const GridField f = sample_field();
  write_dataset(f, tmp.str("ds"));
  write_dataset(f, tmp.str("ds"));
  int entries = 0;
  for (const auto& e : fs::directory_iterator(tmp.str("ds"))) {
    ++entries;
    CHECK(e.path().extension() != ".tmp");
  }
  CHECK(entries == 2);  // header.json + data.f32
}

TEST_CASE("reader rejects missing and malformed inputs") {
  TempDir tmp;
  CHECK_THROWS_WITH_AS(read_dataset(tmp.str("nope")),
                       doctest::Contains("cannot open"), std::runtime_error);

  const GridField f = sample_field();

  // invalid JSON
  write_dataset(f, tmp.str("bad1"));
  std::ofstream(tmp.str("bad1") + "/header.json") << "{ not json";
  CHECK_THROWS_WITH_AS(read_dataset(tmp.str("bad1")),
                       doctest::Contains("malformed header"),
                       std::runtime_error);

  // missing key
  write_dataset(f, tmp.str("bad2"));
  std::ofstream(tmp.str("bad2") + "/header.json")
      << R"({"grid":{"lat_start":0,"lon_start":0,"dlat":1,"dlon":1,)"
      << R"("nlat":2,"nlon":2},"times":["2001-01-01"],"units":"K"})";
  CHECK_THROWS_WITH_AS(read_dataset(tmp.str("bad2")),
                       doctest::Contains("malformed header"),
                       std::runtime_error);

  // truncated payload
  write_dataset(f, tmp.str("bad3"));
  fs::resize_file(tmp.str("bad3") + "/data.f32", 10);
  CHECK_THROWS_WITH_AS(read_dataset(tmp.str("bad3")),
                       doctest::Contains("extent mismatch"),
                       std::runtime_error);

  // non-monotonic time axis
  write_dataset(f, tmp.str("bad4"));
  std::ofstream(tmp.str("bad4") + "/header.json")
      << R"({"grid":{"lat_start":-43.75,"lon_start":1.25,"dlat":2.5,)"
      << R"("dlon":2.5,"nlat":36,"nlon":144},)"
      << R"("times":["1979-01-02","1979-01-01"],)"
      << R"("units":"K","variable":"wet_bulb"})";
  CHECK_THROWS_AS(read_dataset(tmp.str("bad4")), std::invalid_argument);
}

TEST_CASE("grid metadata survives the JSON round trip exactly") {
  TempDir tmp;
  GeoGrid g;
  g.lat_start = -89.9375;        // not representable in decimal shorthand
  g.lon_start = 0.0625;
  g.dlat = 0.1251220703125;      // exact binary fraction
  g.dlon = 0.1251220703125;
  g.nlat = 4;
  g.nlon = 8;
  GridField f = make_field(g, {Date(2001, 6, 1)}, "C", "t2m");
  write_dataset(f, tmp.str("ds"));
  const GridField back = read_dataset(tmp.str("ds"));
  CHECK(back.grid == g);  // bitwise double equality
}

TEST_CASE("surface mask round trip with regions") {
  TempDir tmp;
  GeoGrid g;
  g.lat_start = -75.0;
  g.lon_start = 0.0;
  g.dlat = 30.0;
  g.dlon = 60.0;
  g.nlat = 6;
  g.nlon = 6;
  SurfaceMask m;
  m.grid = g;
  m.surface.resize(g.size());
  m.region.resize(g.size());
  m.region_names = {"", "tundra", "steppe"};
  for (std::size_t p = 0; p < g.size(); ++p) {
    m.surface[p] = p % 2;
    m.region[p] = static_cast<std::uint8_t>(p % 3);
  }
  write_surface_mask(m, tmp.str("mask"));
  const SurfaceMask back = read_surface_mask(tmp.str("mask"));
  CHECK(back.grid == g);
  CHECK(back.surface == m.surface);
  CHECK(back.region == m.region);
  CHECK(back.region_names == m.region_names);
  CHECK(back.region_code("steppe").value() == 2);
  CHECK_FALSE(back.region_code("desert").has_value());
}

TEST_CASE("surface mask without regions reads back clean") {
  TempDir tmp;
  GeoGrid g;
  g.lat_start = -45.0;
  g.lon_start = 0.0;
  g.dlat = 90.0;
  g.dlon = 180.0;
  g.nlat = 2;
  g.nlon = 2;
  SurfaceMask m;
  m.grid = g;
  m.surface = {0, 1, 1, 0};
  write_surface_mask(m, tmp.str("mask"));
  const SurfaceMask back = read_surface_mask(tmp.str("mask"));
  CHECK_FALSE(back.has_regions());
  CHECK(back.surface == m.surface);
}

TEST_CASE("surface flags outside {0,1} are rejected") {
  TempDir tmp;
  GeoGrid g;
  g.lat_start = -45.0;
  g.lon_start = 0.0;
  g.dlat = 90.0;
  g.dlon = 180.0;
  g.nlat = 2;
  g.nlon = 2;
  SurfaceMask m;
  m.grid = g;
  m.surface = {0, 1, 1, 0};
  write_surface_mask(m, tmp.str("mask"));
  {
    std::ofstream bad(tmp.str("mask") + "/data.u8", std::ios::binary);
    const char bytes[] = {2, 1, 0, 1};
    bad.write(bytes, sizeof(bytes));
  }
  CHECK_THROWS_AS(read_surface_mask(tmp.str("mask")), std::invalid_argument);
}
