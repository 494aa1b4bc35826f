#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace snowtrend {

constexpr double kEarthRadiusKm = 6371.0;

// Regular latitude-longitude grid of cell centers. Latitude rows increase
// with index; longitudes wrap on [0, 360).
struct GeoGrid {
  double lat_start = 0.0;
  double lon_start = 0.0;
  double dlat = 0.0;
  double dlon = 0.0;
  int nlat = 0;
  int nlon = 0;

  double lat(int i) const { return lat_start + i * dlat; }
  double lon(int j) const;  // normalized to [0, 360)
  std::size_t size() const {
    return static_cast<std::size_t>(nlat) * static_cast<std::size_t>(nlon);
  }

  bool operator==(const GeoGrid&) const = default;
};

// Throws std::invalid_argument if spacing/extents are unusable or any cell
// center lies outside [-90, 90].
void validate_grid(const GeoGrid& grid);

double normalize_lon(double lon_deg);

// Spherical area of one cell in km^2: R^2 * dlon * (sin(latN) - sin(latS)),
// with the cell edges clipped at the poles.
double cell_area_km2(const GeoGrid& grid, int lat_index);

// Great-circle (haversine) distance in km between two points in degrees.
double great_circle_km(double lat1, double lon1, double lat2, double lon2);

// Nearest cell center for a point: rounded index in latitude, circular
// rounded index in longitude (clamped when the grid does not wrap). Returns
// the linear pixel index i * nlon + j.
std::size_t nearest_pixel(const GeoGrid& grid, double lat_deg, double lon_deg);

enum class Surface : std::uint8_t { ocean = 0, land = 1 };

// Static surface classification on a grid, with optional named region labels
// (code 0 means unlabeled).
struct SurfaceMask {
  GeoGrid grid;
  std::vector<std::uint8_t> surface;       // [lat][lon], 0 = ocean, 1 = land
  std::vector<std::uint8_t> region;        // [lat][lon] label codes; may be empty
  std::vector<std::string> region_names;   // code -> name; index 0 unused

  bool has_regions() const { return !region.empty(); }
  std::uint8_t surface_at(int i, int j) const;
  std::optional<std::uint8_t> region_code(const std::string& name) const;
};

void validate_mask(const SurfaceMask& mask);

enum class SurfaceFilter { any, land, ocean };
enum class HemisphereFilter { global, north, south };

// Pixel subset: surface type, hemisphere (by cell-center latitude; an
// equator-centered row counts as neither), and an optional named region.
struct RegionSelector {
  SurfaceFilter surface = SurfaceFilter::any;
  HemisphereFilter hemisphere = HemisphereFilter::global;
  std::string region;  // empty = no constraint

  std::string describe() const;
};

// Whether pixel (i, j) matches. Throws if the selector names a region the
// mask does not define.
bool selects(const RegionSelector& sel, const SurfaceMask& mask, int i, int j);

}  // namespace snowtrend
