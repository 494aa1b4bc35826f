#include "snowtrend/spr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace snowtrend {

namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

std::vector<Date> pentad_start_dates(int year) {
  std::vector<Date> dates;
  dates.reserve(kPentadsPerYear);
  const Date jan1(year, 1, 1);
  for (int p = 0; p < kPentadsPerYear; ++p)
    dates.push_back(jan1 + (pentad_window(year, p).first_doy - 1));
  return dates;
}

void check_pentad_axis(const GridField& f, int year, const char* what) {
  const auto expected = pentad_start_dates(year);
  if (f.times != expected)
    throw std::invalid_argument(std::string(what) +
                                ": time axis is not the " +
                                std::to_string(year) + " pentad starts");
}

}  // namespace

PentadFrequency snow_frequency_pentads(const GridField& daily_mask, int year) {
  validate_field(daily_mask);
  if (daily_mask.times.size() > 1 &&
      classify_time_step(daily_mask.times) != TimeStep::daily)
    throw std::invalid_argument("snow_frequency_pentads: daily series required");

  // Index of every day of the year; all must be present.
  std::unordered_map<int, std::size_t> day_index;  // day-of-year -> t
  for (std::size_t t = 0; t < daily_mask.times.size(); ++t)
    if (daily_mask.times[t].year() == year)
      day_index[daily_mask.times[t].day_of_year()] = t;
  if (day_index.size() != static_cast<std::size_t>(days_in_year(year)))
    throw std::invalid_argument("snow_frequency_pentads: series does not "
                                "cover year " + std::to_string(year));

  PentadFrequency result{make_field(daily_mask.grid, pentad_start_dates(year),
                                    "fraction", "snow_frequency_pentad"),
                         0};
  const std::size_t pixels = daily_mask.grid.size();
  for (int p = 0; p < kPentadsPerYear; ++p) {
    const PentadWindow w = pentad_window(year, p);
    float* out = result.freq.values.data() + static_cast<std::size_t>(p) * pixels;
    for (std::size_t px = 0; px < pixels; ++px) {
      int valid = 0;
      int snow = 0;
      for (int d = 0; d < w.length; ++d) {
        const std::size_t t = day_index.at(w.first_doy + d);
        const float v = daily_mask.values[t * pixels + px];
        if (std::isnan(v)) continue;
        ++valid;
        if (v > 0.5f) ++snow;
      }
      if (valid == 0) {
        out[px] = kNaN;
        ++result.incomplete;
      } else {
        if (valid < w.length) ++result.incomplete;
        out[px] = static_cast<float>(snow) / static_cast<float>(valid);
      }
    }
  }
  return result;
}

AnnualSprResult annual_spr(const GridField& pentad_freq,
                           const GridField& pentad_precip, int year) {
  validate_field(pentad_freq);
  validate_field(pentad_precip);
  if (pentad_freq.grid != pentad_precip.grid)
    throw std::invalid_argument("annual_spr: grids differ");
  check_pentad_axis(pentad_freq, year, "annual_spr frequency");
  check_pentad_axis(pentad_precip, year, "annual_spr precipitation");
  for (const float v : pentad_precip.values)
    if (!std::isnan(v) && v < 0.0f)
      throw std::invalid_argument("annual_spr: negative precipitation");

  AnnualSprResult result{
      make_field(pentad_freq.grid, {Date(year, 1, 1)}, "fraction", "spr"), 0};
  const std::size_t pixels = pentad_freq.grid.size();
  for (std::size_t px = 0; px < pixels; ++px) {
    double num = 0.0;
    double den = 0.0;
    bool usable = false;
    for (int p = 0; p < kPentadsPerYear; ++p) {
      const float f = pentad_freq.values[static_cast<std::size_t>(p) * pixels + px];
      const float pr =
          pentad_precip.values[static_cast<std::size_t>(p) * pixels + px];
      if (std::isnan(f) || std::isnan(pr)) continue;  // need both factors
      usable = true;
      num += static_cast<double>(f) * pr;
      den += pr;
    }
    if (!usable) continue;  // no overlapping pentads: stays NaN
    if (den == 0.0) {
      ++result.dry_pixels;
      continue;
    }
    result.spr.values[px] = static_cast<float>(num / den);
  }
  return result;
}

}  // namespace snowtrend
