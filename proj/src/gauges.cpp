#include "snowtrend/gauges.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "snowtrend/csv.hpp"

namespace snowtrend {

namespace {

const char* const kColumns[] = {"station_id", "lat",   "lon",
                                "date",       "value", "variable"};

bool is_phase(const std::string& variable) { return variable == "phase"; }

void check_phase(const std::string& phase) {
  if (phase != "snow" && phase != "rain" && phase != "mixed")
    throw std::runtime_error("unknown phase category '" + phase + "'");
}

}  // namespace

std::vector<GaugeRecord> read_gauge_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  std::size_t cols[6];
  for (std::size_t c = 0; c < 6; ++c) cols[c] = table.column(kColumns[c]);

  std::vector<GaugeRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    GaugeRecord r;
    r.station_id = row[cols[0]];
    r.lat = parse_double(row[cols[1]]);
    r.lon = parse_double(row[cols[2]]);
    r.date = Date::parse(row[cols[3]]);
    r.variable = row[cols[5]];
    if (is_phase(r.variable)) {
      r.phase = row[cols[4]];
      check_phase(r.phase);
      r.value = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.value = parse_double(row[cols[4]]);
    }
    if (r.lat < -90.0 || r.lat > 90.0)
      throw std::runtime_error("station latitude out of range for " +
                               r.station_id);
    out.push_back(std::move(r));
  }
  return out;
}

void write_gauge_csv(const std::string& path,
                     std::span<const GaugeRecord> records) {
  CsvTable table;
  table.header.assign(std::begin(kColumns), std::end(kColumns));
  table.rows.reserve(records.size());
  for (const GaugeRecord& r : records) {
    if (is_phase(r.variable)) check_phase(r.phase);
    table.rows.push_back({r.station_id, format_double(r.lat),
                          format_double(r.lon), r.date.to_string(),
                          is_phase(r.variable) ? r.phase
                                               : format_double(r.value),
                          r.variable});
  }
  write_csv(path, table);
}

}  // namespace snowtrend
