#pragma once

#include <span>
#include <string>
#include <vector>

#include "snowtrend/calendar.hpp"

namespace snowtrend {

// One station-day observation. For variable "phase" the value column carries
// a category (snow / rain / mixed) instead of a number.
struct GaugeRecord {
  std::string station_id;
  double lat = 0.0;
  double lon = 0.0;
  Date date;
  double value = 0.0;      // NaN for phase records
  std::string variable;    // e.g. wet_bulb_K, precip_mm, phase
  std::string phase;       // empty unless variable == "phase"
};

// CSV columns: station_id,lat,lon,date,value,variable
std::vector<GaugeRecord> read_gauge_csv(const std::string& path);
void write_gauge_csv(const std::string& path,
                     std::span<const GaugeRecord> records);

}  // namespace snowtrend
