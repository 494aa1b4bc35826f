#include "snowtrend/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "snowtrend/rng.hpp"
#include "snowtrend/trend.hpp"

namespace snowtrend {

namespace {

constexpr double kCelsiusToK = 273.15;
constexpr double kDaysPerYear = 365.2425;

std::vector<Date> time_axis(const SyntheticSpec& spec) {
  std::vector<Date> times;
  if (spec.step == TimeStep::annual) {
    for (int y = 0; y < spec.n_years; ++y)
      times.push_back(Date(spec.first_year + y, 1, 1));
  } else if (spec.step == TimeStep::daily) {
    const Date first(spec.first_year, 1, 1);
    const Date last(spec.first_year + spec.n_years - 1, 12, 31);
    for (Date d = first; d <= last; d = d + 1) times.push_back(d);
  } else {
    throw std::invalid_argument("synthetic step must be daily or annual");
  }
  return times;
}

std::string station_name(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "st%04d", k);
  return buf;
}

// Uniform random point inside the grid's footprint.
void random_location(const GeoGrid& grid, Rng& rng, double& lat, double& lon) {
  const double lat_lo = grid.lat(0) - grid.dlat * 0.5;
  const double lat_hi = grid.lat(grid.nlat - 1) + grid.dlat * 0.5;
  lat = std::clamp(lat_lo + (lat_hi - lat_lo) * rng.uniform(), -90.0, 90.0);
  lon = normalize_lon(grid.lon_start +
                      grid.dlon * grid.nlon * rng.uniform());
}

}  // namespace

std::vector<double> make_ar1(std::size_t n, double phi, double sigma,
                             std::uint64_t seed) {
  if (!(phi > -1.0) || !(phi < 1.0))
    throw std::invalid_argument("make_ar1: phi outside (-1, 1)");
  if (sigma < 0.0) throw std::invalid_argument("make_ar1: negative sigma");
  Rng rng(seed);
  std::vector<double> x(n);
  if (n == 0) return x;
  x[0] = rng.normal() * sigma / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 1; t < n; ++t)
    x[t] = phi * x[t - 1] + sigma * rng.normal();
  return x;
}

SurfaceMask make_synthetic_surface(const GeoGrid& grid,
                                   double land_lon_fraction,
                                   bool climate_bands) {
  validate_grid(grid);
  SurfaceMask m;
  m.grid = grid;
  m.surface.resize(grid.size());
  const double land_cut = 360.0 * std::clamp(land_lon_fraction, 0.0, 1.0);
  if (climate_bands) {
    m.region.resize(grid.size());
    m.region_names = {"", "arid-cold", "cold", "polar"};
  }
  for (int i = 0; i < grid.nlat; ++i) {
    const double alat = std::fabs(grid.lat(i));
    std::uint8_t band = 0;
    if (alat >= 60.0) band = 3;
    else if (alat >= 40.0) band = 2;
    else if (alat >= 25.0) band = 1;
    for (int j = 0; j < grid.nlon; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * grid.nlon + j;
      m.surface[p] = grid.lon(j) < land_cut ? 1 : 0;
      if (climate_bands) m.region[p] = band;
    }
  }
  validate_mask(m);
  return m;
}

SyntheticData make_synthetic(const SyntheticSpec& spec,
                             const SurfaceMask* regions) {
  validate_grid(spec.grid);
  if (spec.n_years < 1)
    throw std::invalid_argument("make_synthetic: need at least one year");
  if (regions) {
    validate_mask(*regions);
    if (regions->grid != spec.grid)
      throw std::invalid_argument("make_synthetic: region grid differs");
  }
  if (!spec.region_trends.empty() && (!regions || !regions->has_regions()))
    throw std::invalid_argument("make_synthetic: region trends need labels");

  const std::vector<Date> times = time_axis(spec);
  const std::size_t pixels = spec.grid.size();

  // Per-pixel trend (regional overrides on top of the global rate).
  std::vector<double> trend(pixels, spec.trend_c_per_decade);
  for (const auto& [name, rate] : spec.region_trends) {
    const auto code = regions->region_code(name);
    if (!code)
      throw std::invalid_argument("make_synthetic: unknown region '" + name +
                                  "'");
    for (std::size_t p = 0; p < pixels; ++p)
      if (regions->region[p] == *code) trend[p] = rate;
  }

  const std::vector<double> shared =
      make_ar1(times.size(), spec.ar1_phi, spec.ar1_sigma,
               splitmix64(spec.seed ^ 1));

  SyntheticData data;
  data.truth = make_field(spec.grid, times, "K", "wet_bulb");
  for (std::size_t t = 0; t < times.size(); ++t) {
    const double years =
        static_cast<double>(times[t] - times.front()) / kDaysPerYear;
    float* out = data.truth.values.data() + t * pixels;
    for (int i = 0; i < spec.grid.nlat; ++i) {
      const double climate =
          spec.equator_c -
          spec.pole_drop_c * std::fabs(spec.grid.lat(i)) / 90.0;
      for (int j = 0; j < spec.grid.nlon; ++j) {
        const std::size_t p = static_cast<std::size_t>(i) * spec.grid.nlon + j;
        out[p] = static_cast<float>(kCelsiusToK + climate +
                                    trend[p] * years / 10.0 + shared[t]);
      }
    }
  }

  for (std::size_t m = 0; m < spec.product_sigmas.size(); ++m) {
    const double sigma = spec.product_sigmas[m];
    if (!(sigma > 0.0))
      throw std::invalid_argument("make_synthetic: product sigma must be > 0");
    Rng rng(splitmix64(spec.seed ^ (m + 2)));
    GridField prod = data.truth;
    prod.variable = "wet_bulb";
    for (float& v : prod.values)
      v = static_cast<float>(v + sigma * rng.normal());
    data.products.push_back(std::move(prod));
  }
  return data;
}

std::vector<GaugeRecord> sample_truth_gauges(const GridField& truth,
                                             int n_stations,
                                             const std::string& variable,
                                             std::uint64_t seed) {
  validate_field(truth);
  if (n_stations < 1)
    throw std::invalid_argument("sample_truth_gauges: need stations");
  Rng rng(splitmix64(seed ^ 0x67617567ULL));

  std::vector<GaugeRecord> out;
  out.reserve(static_cast<std::size_t>(n_stations) * truth.ntimes());
  for (int k = 0; k < n_stations; ++k) {
    GaugeRecord base;
    base.station_id = station_name(k);
    random_location(truth.grid, rng, base.lat, base.lon);
    const std::size_t pixel = nearest_pixel(truth.grid, base.lat, base.lon);
    for (std::size_t t = 0; t < truth.ntimes(); ++t) {
      const float v = truth.values[t * truth.grid.size() + pixel];
      if (std::isnan(v)) continue;
      GaugeRecord r = base;
      r.date = truth.times[t];
      r.value = v;
      r.variable = variable;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<GaugeRecord> sample_precip_gauges(const GridField& truth_wb,
                                              const SurfaceMask& surface,
                                              const SnowThreshold& thr,
                                              int n_stations, double mean_mm,
                                              double sd_mm,
                                              std::uint64_t seed) {
  validate_field(truth_wb);
  validate_mask(surface);
  if (truth_wb.grid != surface.grid)
    throw std::invalid_argument("sample_precip_gauges: grids differ");
  if (truth_wb.units != "K")
    throw std::invalid_argument("sample_precip_gauges: truth must be in K");
  Rng rng(splitmix64(seed ^ 0x70726563ULL));

  std::vector<GaugeRecord> out;
  for (int k = 0; k < n_stations; ++k) {
    GaugeRecord base;
    base.station_id = station_name(k);
    random_location(truth_wb.grid, rng, base.lat, base.lon);
    const std::size_t pixel = nearest_pixel(truth_wb.grid, base.lat, base.lon);
    const bool land =
        surface.surface[pixel] == static_cast<std::uint8_t>(Surface::land);
    const double cut = kCelsiusToK + (land ? thr.land_c : thr.ocean_c);
    for (std::size_t t = 0; t < truth_wb.ntimes(); ++t) {
      const float wb = truth_wb.values[t * truth_wb.grid.size() + pixel];
      if (std::isnan(wb)) continue;
      GaugeRecord precip = base;
      precip.date = truth_wb.times[t];
      precip.value = std::max(0.0, mean_mm + sd_mm * rng.normal());
      precip.variable = "precip_mm";
      GaugeRecord phase = base;
      phase.date = precip.date;
      phase.variable = "phase";
      phase.phase = wb <= cut ? "snow" : "rain";
      phase.value = std::numeric_limits<double>::quiet_NaN();
      out.push_back(std::move(precip));
      out.push_back(std::move(phase));
    }
  }
  return out;
}

GridField make_synthetic_pentad_precip(const GeoGrid& grid, int first_year,
                                       int n_years, double mean_mm,
                                       double sd_mm, std::uint64_t seed) {
  validate_grid(grid);
  if (n_years < 1)
    throw std::invalid_argument("make_synthetic_pentad_precip: need years");
  std::vector<Date> times;
  for (int y = 0; y < n_years; ++y) {
    const int year = first_year + y;
    const Date jan1(year, 1, 1);
    for (int p = 0; p < kPentadsPerYear; ++p)
      times.push_back(jan1 + (pentad_window(year, p).first_doy - 1));
  }
  GridField precip = make_field(grid, std::move(times), "mm", "precip");
  Rng rng(splitmix64(seed ^ 0x70656e74ULL));
  for (float& v : precip.values)
    v = static_cast<float>(std::max(0.0, mean_mm + sd_mm * rng.normal()));
  return precip;
}

}  // namespace snowtrend
