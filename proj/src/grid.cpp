#include "snowtrend/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snowtrend {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kLatSlack = 1e-9;  // tolerate rounding at the poles

}  // namespace

double normalize_lon(double lon_deg) {
  double r = std::fmod(lon_deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r == 360.0 ? 0.0 : r;
}

double GeoGrid::lon(int j) const { return normalize_lon(lon_start + j * dlon); }

void validate_grid(const GeoGrid& grid) {
  if (grid.nlat <= 0 || grid.nlon <= 0)
    throw std::invalid_argument("grid extents must be positive");
  if (!(grid.dlat > 0.0) || !(grid.dlon > 0.0))
    throw std::invalid_argument("grid spacing must be positive");
  if (grid.lat(0) < -90.0 - kLatSlack ||
      grid.lat(grid.nlat - 1) > 90.0 + kLatSlack)
    throw std::invalid_argument("cell-center latitudes leave [-90, 90]");
  if (grid.dlon * grid.nlon > 360.0 + grid.dlon * 0.5 + kLatSlack)
    throw std::invalid_argument("longitudes wrap past a full circle");
}

double cell_area_km2(const GeoGrid& grid, int lat_index) {
  if (lat_index < 0 || lat_index >= grid.nlat)
    throw std::out_of_range("latitude index out of range: " +
                            std::to_string(lat_index));
  const double lat = grid.lat(lat_index);
  const double south = std::max(lat - grid.dlat * 0.5, -90.0) * kDegToRad;
  const double north = std::min(lat + grid.dlat * 0.5, 90.0) * kDegToRad;
  return kEarthRadiusKm * kEarthRadiusKm * (grid.dlon * kDegToRad) *
         (std::sin(north) - std::sin(south));
}

double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDegToRad;
  const double p2 = lat2 * kDegToRad;
  const double dp = (lat2 - lat1) * kDegToRad;
  const double dl = (lon2 - lon1) * kDegToRad;
  const double a = std::sin(dp * 0.5) * std::sin(dp * 0.5) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl * 0.5) *
                       std::sin(dl * 0.5);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

std::size_t nearest_pixel(const GeoGrid& grid, double lat_deg, double lon_deg) {
  int i = static_cast<int>(std::lround((lat_deg - grid.lat_start) / grid.dlat));
  i = std::clamp(i, 0, grid.nlat - 1);
  const double rel = normalize_lon(lon_deg - grid.lon_start) / grid.dlon;
  int j = static_cast<int>(std::lround(rel));
  const bool wraps = grid.dlon * grid.nlon >= 360.0 - 1e-9;
  if (wraps)
    j %= grid.nlon;
  else
    j = std::clamp(j, 0, grid.nlon - 1);
  return static_cast<std::size_t>(i) * grid.nlon + j;
}

std::uint8_t SurfaceMask::surface_at(int i, int j) const {
  return surface[static_cast<std::size_t>(i) * grid.nlon + j];
}

std::optional<std::uint8_t> SurfaceMask::region_code(
    const std::string& name) const {
  for (std::size_t c = 1; c < region_names.size(); ++c)
    if (region_names[c] == name) return static_cast<std::uint8_t>(c);
  return std::nullopt;
}

void validate_mask(const SurfaceMask& mask) {
  validate_grid(mask.grid);
  if (mask.surface.size() != mask.grid.size())
    throw std::invalid_argument("surface mask extent mismatch");
  for (const std::uint8_t v : mask.surface)
    if (v > 1) throw std::invalid_argument("surface flag must be 0 or 1");
  if (!mask.region.empty()) {
    if (mask.region.size() != mask.grid.size())
      throw std::invalid_argument("region mask extent mismatch");
    for (const std::uint8_t c : mask.region)
      if (c >= mask.region_names.size())
        throw std::invalid_argument("region code without a name: " +
                                    std::to_string(c));
  }
}

std::string RegionSelector::describe() const {
  std::string s;
  switch (hemisphere) {
    case HemisphereFilter::global: s = "global"; break;
    case HemisphereFilter::north: s = "north"; break;
    case HemisphereFilter::south: s = "south"; break;
  }
  switch (surface) {
    case SurfaceFilter::any: break;
    case SurfaceFilter::land: s += " land"; break;
    case SurfaceFilter::ocean: s += " ocean"; break;
  }
  if (!region.empty()) s += " " + region;
  return s;
}

bool selects(const RegionSelector& sel, const SurfaceMask& mask, int i, int j) {
  const double lat = mask.grid.lat(i);
  if (sel.hemisphere == HemisphereFilter::north && !(lat > 0.0)) return false;
  if (sel.hemisphere == HemisphereFilter::south && !(lat < 0.0)) return false;
  if (sel.surface != SurfaceFilter::any) {
    const auto want = sel.surface == SurfaceFilter::land
                          ? static_cast<std::uint8_t>(Surface::land)
                          : static_cast<std::uint8_t>(Surface::ocean);
    if (mask.surface_at(i, j) != want) return false;
  }
  if (!sel.region.empty()) {
    const auto code = mask.region_code(sel.region);
    if (!code)
      throw std::invalid_argument("unknown region '" + sel.region + "'");
    if (!mask.has_regions() ||
        mask.region[static_cast<std::size_t>(i) * mask.grid.nlon + j] != *code)
      return false;
  }
  return true;
}

}  // namespace snowtrend
