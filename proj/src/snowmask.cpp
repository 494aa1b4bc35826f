#include "snowtrend/snowmask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "snowtrend/trend.hpp"

namespace snowtrend {

namespace {

constexpr double kCelsiusToK = 273.15;
constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

bool mask_on(float v) { return !std::isnan(v) && v > 0.5f; }

}  // namespace

SnowMaskSeries potential_snow_mask(const GridField& t_wb,
                                   const SurfaceMask& surface,
                                   const SnowThreshold& thr) {
  validate_field(t_wb);
  validate_mask(surface);
  if (t_wb.grid != surface.grid)
    throw std::invalid_argument("potential_snow_mask: grids differ");

  double offset;
  if (t_wb.units == "K")
    offset = kCelsiusToK;
  else if (t_wb.units == "C")
    offset = 0.0;
  else
    throw std::invalid_argument("potential_snow_mask: units must be K or C, "
                                "got '" + t_wb.units + "'");
  const double land_cut = thr.land_c + offset;
  const double ocean_cut = thr.ocean_c + offset;

  SnowMaskSeries series{make_field(t_wb.grid, t_wb.times, "flag", "snow_mask"),
                        thr, t_wb.variable};
  const std::size_t pixels = t_wb.grid.size();
  for (std::size_t t = 0; t < t_wb.ntimes(); ++t) {
    const float* in = t_wb.values.data() + t * pixels;
    float* out = series.mask.values.data() + t * pixels;
    for (std::size_t p = 0; p < pixels; ++p) {
      if (std::isnan(in[p])) {
        out[p] = kNaN;
        continue;
      }
      const double cut =
          surface.surface[p] == static_cast<std::uint8_t>(Surface::land)
              ? land_cut
              : ocean_cut;
      out[p] = in[p] <= cut ? 1.0f : 0.0f;
    }
  }
  return series;
}

std::vector<double> snow_area_km2(const GridField& mask,
                                  const SurfaceMask& surface,
                                  const RegionSelector& sel) {
  validate_field(mask);
  validate_mask(surface);
  if (mask.grid != surface.grid)
    throw std::invalid_argument("snow_area_km2: grids differ");

  std::vector<double> out(mask.ntimes(), 0.0);
  for (int i = 0; i < mask.grid.nlat; ++i) {
    const double area = cell_area_km2(mask.grid, i);
    for (int j = 0; j < mask.grid.nlon; ++j) {
      if (!selects(sel, surface, i, j)) continue;
      for (std::size_t t = 0; t < mask.ntimes(); ++t)
        if (mask_on(mask.at(t, i, j))) out[t] += area;
    }
  }
  return out;
}

GridField exceedance_frequency(const GridField& mask, int first_year,
                               int last_year) {
  validate_field(mask);
  if (first_year > last_year)
    throw std::invalid_argument("exceedance_frequency: year range reversed");
  if (classify_time_step(mask.times) != TimeStep::daily &&
      mask.times.size() > 1)
    throw std::invalid_argument("exceedance_frequency: daily series required");

  long long total_days = 0;
  for (int y = first_year; y <= last_year; ++y) total_days += days_in_year(y);

  const Date first(first_year, 1, 1);
  const Date last(last_year, 12, 31);
  std::set<std::int64_t> present;
  for (const Date& d : mask.times)
    if (first <= d && d <= last) present.insert(d.serial());
  if (static_cast<long long>(present.size()) != total_days)
    throw std::invalid_argument(
        "exceedance_frequency: series does not cover " +
        std::to_string(first_year) + "-" + std::to_string(last_year));

  const std::size_t pixels = mask.grid.size();
  std::vector<long long> snow(pixels, 0);
  std::vector<long long> valid(pixels, 0);
  for (std::size_t t = 0; t < mask.ntimes(); ++t) {
    const Date& d = mask.times[t];
    if (d < first || last < d) continue;
    const float* layer = mask.values.data() + t * pixels;
    for (std::size_t p = 0; p < pixels; ++p) {
      if (std::isnan(layer[p])) continue;
      ++valid[p];
      if (layer[p] > 0.5f) ++snow[p];
    }
  }

  GridField freq = make_field(mask.grid, {first}, "fraction", "snow_frequency");
  for (std::size_t p = 0; p < pixels; ++p)
    if (valid[p] > 0)
      freq.values[p] = static_cast<float>(static_cast<double>(snow[p]) /
                                          static_cast<double>(total_days));
  return freq;
}

GridField exceedance_mask(const GridField& freq, double level) {
  validate_field(freq);
  if (!(level > 0.0) || level > 1.0)
    throw std::invalid_argument("exceedance_mask: level outside (0, 1]");
  GridField out =
      make_field(freq.grid, freq.times, "flag", "snow_exceedance");
  for (std::size_t p = 0; p < freq.values.size(); ++p) {
    const float v = freq.values[p];
    if (std::isnan(v)) continue;
    out.values[p] = v >= level ? 1.0f : 0.0f;
  }
  return out;
}

std::array<double, kTransitionSlices> slice_areas_nh(const GridField& mask,
                                                     double anchor_deg) {
  validate_field(mask);
  std::array<double, kTransitionSlices> acc{};
  for (int i = 0; i < mask.grid.nlat; ++i) {
    if (!(mask.grid.lat(i) > 0.0)) continue;
    const double area = cell_area_km2(mask.grid, i);
    for (int j = 0; j < mask.grid.nlon; ++j) {
      const int slice = static_cast<int>(
          normalize_lon(mask.grid.lon(j) - anchor_deg) / kSliceWidthDeg);
      for (std::size_t t = 0; t < mask.ntimes(); ++t)
        if (mask_on(mask.at(t, i, j)))
          acc[std::min(slice, kTransitionSlices - 1)] += area;
    }
  }
  for (double& a : acc) a /= static_cast<double>(mask.ntimes());
  return acc;
}

double sector_area_km2(double latitude_deg) {
  constexpr double kSliceWidthRad =
      kSliceWidthDeg * std::numbers::pi / 180.0;
  return kEarthRadiusKm * kEarthRadiusKm * kSliceWidthRad *
         (1.0 - std::sin(latitude_deg * std::numbers::pi / 180.0));
}

TransitionLatitudes transition_latitudes(
    std::span<const double> slice_area_km2, double exceedance_level,
    double anchor_deg) {
  if (slice_area_km2.size() != kTransitionSlices)
    throw std::invalid_argument("transition_latitudes: expected " +
                                std::to_string(kTransitionSlices) + " areas");
  constexpr double kSliceWidthRad =
      kSliceWidthDeg * std::numbers::pi / 180.0;
  const double sector_full = kEarthRadiusKm * kEarthRadiusKm * kSliceWidthRad;

  TransitionLatitudes result;
  result.exceedance_level = exceedance_level;
  result.anchor_deg = anchor_deg;
  result.slices.reserve(kTransitionSlices);
  for (int s = 0; s < kTransitionSlices; ++s) {
    const double area = slice_area_km2[s];
    if (!(area >= 0.0))
      throw std::invalid_argument("transition_latitudes: negative area in "
                                  "slice " + std::to_string(s));
    TransitionSlice slice;
    slice.lon_west = normalize_lon(anchor_deg + s * kSliceWidthDeg);
    slice.lon_east = normalize_lon(anchor_deg + (s + 1) * kSliceWidthDeg);
    slice.area_km2 = area;
    // Area accumulates from the pole southward; more area = lower latitude.
    const double sine = 1.0 - area / sector_full;
    if (sine < 0.0) {
      slice.latitude_deg = 0.0;
      slice.clamped = true;
    } else {
      slice.latitude_deg =
          std::asin(std::min(sine, 1.0)) * 180.0 / std::numbers::pi;
    }
    result.slices.push_back(slice);
  }
  return result;
}

std::array<double, kTransitionSlices> retraction_rates_deg_per_decade(
    std::span<const int> years,
    std::span<const std::array<double, kTransitionSlices>> latitudes) {
  if (years.size() != latitudes.size())
    throw std::invalid_argument("retraction_rates: year/latitude mismatch");
  std::array<double, kTransitionSlices> rates{};
  AnnualSeries series;
  series.years.assign(years.begin(), years.end());
  series.values.resize(years.size());
  for (int s = 0; s < kTransitionSlices; ++s) {
    for (std::size_t y = 0; y < years.size(); ++y)
      series.values[y] = latitudes[y][s];
    rates[s] = theil_sen(series) * 10.0;
  }
  return rates;
}

}  // namespace snowtrend
