#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "snowtrend/field.hpp"
#include "snowtrend/gauges.hpp"
#include "snowtrend/snowmask.hpp"

namespace snowtrend {

// Synthetic wet-bulb world: a zonal climatology with an imposed linear trend,
// a shared AR(1) component in time, and per-product white observation noise.
struct SyntheticSpec {
  GeoGrid grid;
  int first_year = 2001;
  int n_years = 5;
  TimeStep step = TimeStep::daily;  // daily or annual
  double equator_c = 18.0;          // climatology at the equator
  double pole_drop_c = 45.0;        // equator-to-pole decrease
  double trend_c_per_decade = 0.0;
  std::vector<std::pair<std::string, double>> region_trends;  // overrides
  double ar1_phi = 0.3;
  double ar1_sigma = 0.15;
  std::vector<double> product_sigmas = {1.47, 1.5, 2.69};
  std::uint64_t seed = 0;
};

struct SyntheticData {
  GridField truth;                  // wet-bulb truth, K
  std::vector<GridField> products;  // truth + N(0, sigma_m) per product
};

// regions (optional) supplies labels for region_trends overrides; it must
// be on the generator grid.
SyntheticData make_synthetic(const SyntheticSpec& spec,
                             const SurfaceMask* regions = nullptr);

// Land west of land_lon_fraction * 360 degrees; latitude bands labeled
// arid-cold (25-40), cold (40-60) and polar (>= 60) when climate_bands is on.
SurfaceMask make_synthetic_surface(const GeoGrid& grid,
                                   double land_lon_fraction = 0.5,
                                   bool climate_bands = true);

// Stationary AR(1) draw: x_t = phi x_{t-1} + sigma e_t.
std::vector<double> make_ar1(std::size_t n, double phi, double sigma,
                             std::uint64_t seed);

// Random station locations reporting the truth value of their nearest cell
// on every time step, as `variable` records.
std::vector<GaugeRecord> sample_truth_gauges(const GridField& truth,
                                             int n_stations,
                                             const std::string& variable,
                                             std::uint64_t seed);

// Station daily precipitation (clipped normal) plus a phase record derived
// from the truth wet-bulb against the surface-type threshold.
std::vector<GaugeRecord> sample_precip_gauges(const GridField& truth_wb,
                                              const SurfaceMask& surface,
                                              const SnowThreshold& thr,
                                              int n_stations, double mean_mm,
                                              double sd_mm,
                                              std::uint64_t seed);

// Pentad precipitation cube (73 layers per year), iid clipped normal.
GridField make_synthetic_pentad_precip(const GeoGrid& grid, int first_year,
                                       int n_years, double mean_mm,
                                       double sd_mm, std::uint64_t seed);

}  // namespace snowtrend
