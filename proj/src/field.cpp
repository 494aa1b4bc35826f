#include "snowtrend/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace snowtrend {

GridField make_field(GeoGrid grid, std::vector<Date> times, std::string units,
                     std::string variable) {
  validate_grid(grid);
  GridField f;
  f.grid = grid;
  f.times = std::move(times);
  f.units = std::move(units);
  f.variable = std::move(variable);
  f.values.assign(f.times.size() * grid.size(),
                  std::numeric_limits<float>::quiet_NaN());
  validate_field(f);
  return f;
}

void validate_field(const GridField& field) {
  validate_grid(field.grid);
  if (field.times.empty())
    throw std::invalid_argument("field has no time steps");
  for (std::size_t t = 1; t < field.times.size(); ++t)
    if (!(field.times[t - 1] < field.times[t]))
      throw std::invalid_argument("time axis not strictly increasing at step " +
                                  std::to_string(t));
  if (field.values.size() != field.times.size() * field.grid.size())
    throw std::invalid_argument("field extent mismatch: " +
                                std::to_string(field.values.size()) +
                                " values for " +
                                std::to_string(field.times.size()) + "x" +
                                std::to_string(field.grid.size()) + " cells");
}

std::vector<std::uint32_t> nearest_source_map(const GeoGrid& src,
                                              const GeoGrid& dst) {
  validate_grid(src);
  validate_grid(dst);
  if (src.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("source grid too large for the pixel map");

  // Longitude sets repeat across rows, so the best source column for a given
  // destination column is row-independent: the circularly closest longitude,
  // ties to the smaller index.
  std::vector<int> best_col(dst.nlon);
  for (int jd = 0; jd < dst.nlon; ++jd) {
    const double ld = dst.lon(jd);
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int js = 0; js < src.nlon; ++js) {
      double d = std::fabs(normalize_lon(ld - src.lon(js)));
      d = std::min(d, 360.0 - d);
      if (d < best) {
        best = d;
        arg = js;
      }
    }
    best_col[jd] = arg;
  }

  std::vector<std::uint32_t> map(dst.size());
  for (int id = 0; id < dst.nlat; ++id) {
    const double latd = dst.lat(id);
    for (int jd = 0; jd < dst.nlon; ++jd) {
      const double lond = dst.lon(jd);
      const int js = best_col[jd];
      const double lons = src.lon(js);
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int is = 0; is < src.nlat; ++is) {
        const double d = great_circle_km(latd, lond, src.lat(is), lons);
        if (d < best) {
          best = d;
          arg = is;
        }
      }
      map[static_cast<std::size_t>(id) * dst.nlon + jd] =
          static_cast<std::uint32_t>(arg) * src.nlon + js;
    }
  }
  return map;
}

GridField regrid_nearest(const GridField& src, const GeoGrid& dst) {
  validate_field(src);
  if (src.grid == dst) return src;
  const auto map = nearest_source_map(src.grid, dst);
  GridField out = make_field(dst, src.times, src.units, src.variable);
  const std::size_t src_pixels = src.grid.size();
  const std::size_t dst_pixels = dst.size();
  for (std::size_t t = 0; t < src.times.size(); ++t) {
    const float* in = src.values.data() + t * src_pixels;
    float* dest = out.values.data() + t * dst_pixels;
    for (std::size_t p = 0; p < dst_pixels; ++p) dest[p] = in[map[p]];
  }
  return out;
}

std::vector<double> area_weighted_mean(const GridField& field,
                                       const SurfaceMask& mask,
                                       const RegionSelector& sel) {
  validate_field(field);
  validate_mask(mask);
  if (field.grid != mask.grid)
    throw std::invalid_argument("field and mask grids differ");

  std::vector<std::size_t> pixels;
  std::vector<double> weights;
  for (int i = 0; i < field.grid.nlat; ++i) {
    const double area = cell_area_km2(field.grid, i);
    for (int j = 0; j < field.grid.nlon; ++j) {
      if (!selects(sel, mask, i, j)) continue;
      pixels.push_back(static_cast<std::size_t>(i) * field.grid.nlon + j);
      weights.push_back(area);
    }
  }
  if (pixels.empty())
    throw std::invalid_argument("selector '" + sel.describe() +
                                "' matches no pixels");

  std::vector<double> out(field.ntimes());
  for (std::size_t t = 0; t < field.ntimes(); ++t) {
    const auto layer = field.layer(t);
    double wsum = 0.0;
    double acc = 0.0;
    for (std::size_t p = 0; p < pixels.size(); ++p) {
      const float v = layer[pixels[p]];
      if (std::isnan(v)) continue;
      acc += weights[p] * v;
      wsum += weights[p];
    }
    if (wsum == 0.0)
      throw std::runtime_error("all selected pixels missing at " +
                               field.times[t].to_string());
    out[t] = acc / wsum;
  }
  return out;
}

}  // namespace snowtrend
