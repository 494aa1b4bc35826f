#pragma once

#include <span>
#include <string>
#include <vector>

#include "snowtrend/calendar.hpp"
#include "snowtrend/grid.hpp"

namespace snowtrend {

// Time x lat x lon cube on a GeoGrid. Values are stored as IEEE-754 binary32,
// row-major [time][lat][lon]; NaN encodes missing.
struct GridField {
  GeoGrid grid;
  std::vector<Date> times;
  std::vector<float> values;
  std::string units;
  std::string variable;

  std::size_t ntimes() const { return times.size(); }
  std::size_t index(std::size_t t, int i, int j) const {
    return (t * grid.nlat + i) * grid.nlon + j;
  }
  float at(std::size_t t, int i, int j) const { return values[index(t, i, j)]; }
  float& at(std::size_t t, int i, int j) { return values[index(t, i, j)]; }
  std::span<const float> layer(std::size_t t) const {
    return {values.data() + t * grid.size(), grid.size()};
  }
  std::span<float> layer(std::size_t t) {
    return {values.data() + t * grid.size(), grid.size()};
  }
};

// NaN-filled field with validated metadata.
GridField make_field(GeoGrid grid, std::vector<Date> times, std::string units,
                     std::string variable);

// Checks grid validity, extent consistency, and a strictly increasing time
// axis. Throws std::invalid_argument.
void validate_field(const GridField& field);

// Source pixel feeding each destination pixel under nearest-center regridding
// (linear source index i * nlon + j). Distances are great-circle between cell
// centers; exact ties resolve to the smallest (lat index, lon index) pair.
std::vector<std::uint32_t> nearest_source_map(const GeoGrid& src,
                                              const GeoGrid& dst);

// Nearest-neighbour regridding: every output value is copied verbatim from
// the chosen source cell, so NaN propagates and no new values appear.
GridField regrid_nearest(const GridField& src, const GeoGrid& dst);

// Cell-area weighted mean over the selected pixels, one value per time step.
// Missing pixels are excluded per step. Throws if the selection is empty or
// if every selected pixel is missing at some step.
std::vector<double> area_weighted_mean(const GridField& field,
                                       const SurfaceMask& mask,
                                       const RegionSelector& sel);

}  // namespace snowtrend
