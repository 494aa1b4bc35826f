#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "snowtrend/field.hpp"

namespace snowtrend {

// Wet-bulb thresholds in degrees Celsius under which precipitation is taken
// to fall as snow; the ocean value sits slightly higher.
struct SnowThreshold {
  double land_c = 1.0;
  double ocean_c = 1.1;
};

struct SnowMaskSeries {
  GridField mask;  // 1 = potential snowfall, 0 = not, NaN = missing
  SnowThreshold threshold;
  std::string source_variable;
};

// Daily potential-snowfall mask: 1 where t_wb <= threshold for the pixel's
// surface type (inclusive). Accepts wet-bulb fields in "K" or "C".
SnowMaskSeries potential_snow_mask(const GridField& t_wb,
                                   const SurfaceMask& surface,
                                   const SnowThreshold& thr = {});

// Total area (km^2) of mask == 1 pixels inside the selector, per time step.
std::vector<double> snow_area_km2(const GridField& mask,
                                  const SurfaceMask& surface,
                                  const RegionSelector& sel = {});

// Fraction of calendar days in [first_year, last_year] with mask == 1, per
// pixel. The daily series must cover the whole range; pixels that are missing
// on every day come out NaN. Single-layer output stamped Jan 1 of first_year.
GridField exceedance_frequency(const GridField& mask, int first_year,
                               int last_year);

// Binary field: 1 where frequency >= level (inclusive), NaN preserved.
GridField exceedance_mask(const GridField& freq, double level);

constexpr int kTransitionSlices = 24;  // 15-degree longitude sectors
constexpr double kSliceWidthDeg = 360.0 / kTransitionSlices;

// Mean northern-hemisphere area of mask == 1 pixels per longitude slice,
// averaged over the field's time steps. anchor_deg rotates the slice origin.
std::array<double, kTransitionSlices> slice_areas_nh(const GridField& mask,
                                                     double anchor_deg = 0.0);

// Pole-to-latitude area of one 15-degree sector: R^2 * (pi/12) * (1 - sin p).
double sector_area_km2(double latitude_deg);

struct TransitionSlice {
  double lon_west = 0.0;
  double lon_east = 0.0;
  double area_km2 = 0.0;
  double latitude_deg = 0.0;
  bool clamped = false;  // area exceeded the full sector; latitude forced to 0
};

struct TransitionLatitudes {
  double exceedance_level = 0.0;
  double anchor_deg = 0.0;
  std::vector<TransitionSlice> slices;
};

// Inverts each slice area into the equivalent cap-edge latitude
// p = asin(1 - A / (R^2 * pi/12)), accumulating area from the pole; results
// clamp to [0, 90] degrees.
TransitionLatitudes transition_latitudes(
    std::span<const double> slice_area_km2, double exceedance_level,
    double anchor_deg = 0.0);

// Theil-Sen slope of each slice's latitude series, scaled to degrees per
// decade; positive = poleward retreat.
std::array<double, kTransitionSlices> retraction_rates_deg_per_decade(
    std::span<const int> years,
    std::span<const std::array<double, kTransitionSlices>> latitudes);

}  // namespace snowtrend
