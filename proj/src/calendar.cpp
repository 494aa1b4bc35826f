#include "snowtrend/calendar.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace snowtrend {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(std::int64_t serial) {
  return chr::year_month_day{chr::sys_days{chr::days{serial}}};
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("bad date component '" + std::string(s) + "'");
  return v;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  const chr::year_month_day ymd{chr::year{year}, chr::month{month},
                                chr::day{day}};
  if (!ymd.ok())
    throw std::invalid_argument("invalid date " + std::to_string(year) + "-" +
                                std::to_string(month) + "-" +
                                std::to_string(day));
  serial_ = chr::sys_days{ymd}.time_since_epoch().count();
}

Date Date::from_serial(std::int64_t days) {
  Date d;
  d.serial_ = days;
  return d;
}

Date Date::parse(const std::string& iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
    throw std::invalid_argument("date not in YYYY-MM-DD form: '" + iso + "'");
  const int y = parse_int(std::string_view(iso).substr(0, 4));
  const int m = parse_int(std::string_view(iso).substr(5, 2));
  const int d = parse_int(std::string_view(iso).substr(8, 2));
  return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

int Date::year() const { return static_cast<int>(to_ymd(serial_).year()); }

unsigned Date::month() const {
  return static_cast<unsigned>(to_ymd(serial_).month());
}

unsigned Date::day() const { return static_cast<unsigned>(to_ymd(serial_).day()); }

int Date::day_of_year() const {
  return static_cast<int>(serial_ - Date(year(), 1, 1).serial_) + 1;
}

bool is_leap_year(int year) {
  return chr::year{year}.is_leap();
}

int days_in_year(int year) { return is_leap_year(year) ? 366 : 365; }

int days_in_month(int year, unsigned month) {
  const chr::year_month_day_last last{chr::year{year},
                                      chr::month_day_last{chr::month{month}}};
  return static_cast<int>(static_cast<unsigned>(last.day()));
}

std::string season_name(Season s) {
  switch (s) {
    case Season::djf: return "DJF";
    case Season::mam: return "MAM";
    case Season::jja: return "JJA";
    case Season::son: return "SON";
  }
  throw std::logic_error("unreachable season");
}

Season season_of(const Date& d) {
  switch (d.month()) {
    case 12: case 1: case 2: return Season::djf;
    case 3: case 4: case 5: return Season::mam;
    case 6: case 7: case 8: return Season::jja;
    default: return Season::son;
  }
}

int season_year(const Date& d) {
  return d.month() == 12 ? d.year() + 1 : d.year();
}

PentadWindow pentad_window(int year, int pentad) {
  if (pentad < 0 || pentad >= kPentadsPerYear)
    throw std::invalid_argument("pentad index out of range: " +
                                std::to_string(pentad));
  PentadWindow w{pentad * 5 + 1, 5};
  if (pentad == kPentadsPerYear - 1 && is_leap_year(year)) w.length = 6;
  return w;
}

int pentad_of(const Date& d) {
  return std::min((d.day_of_year() - 1) / 5, kPentadsPerYear - 1);
}

TimeStep classify_time_step(std::span<const Date> times) {
  if (times.empty()) throw std::invalid_argument("empty time axis");
  if (times.size() == 1) return TimeStep::single;

  bool daily = true;
  for (std::size_t t = 1; t < times.size(); ++t)
    daily = daily && times[t] - times[t - 1] == 1;
  if (daily) return TimeStep::daily;

  bool pentad = true;
  for (std::size_t t = 0; t < times.size() && pentad; ++t) {
    const Date& d = times[t];
    const PentadWindow w = pentad_window(d.year(), pentad_of(d));
    pentad = d.day_of_year() == w.first_doy;
    if (pentad && t > 0) {
      const Date& prev = times[t - 1];
      const int step = pentad_of(d) - pentad_of(prev);
      const bool same_year = d.year() == prev.year() && step == 1;
      const bool wrap = d.year() == prev.year() + 1 && pentad_of(d) == 0 &&
                        pentad_of(prev) == kPentadsPerYear - 1;
      pentad = same_year || wrap;
    }
  }
  if (pentad) return TimeStep::pentad;

  bool annual = true;
  for (const Date& d : times)
    annual = annual && d.month() == 1 && d.day() == 1;
  if (annual) return TimeStep::annual;

  return TimeStep::irregular;
}

namespace {

int season_days(int year, Season s) {
  switch (s) {
    case Season::djf:
      return 31 + 31 + days_in_month(year, 2);  // Dec of year-1, Jan, Feb
    case Season::mam: return 31 + 30 + 31;
    case Season::jja: return 30 + 31 + 31;
    case Season::son: return 30 + 31 + 30;
  }
  throw std::logic_error("unreachable season");
}

}  // namespace

std::vector<AnnualValue> aggregate_annual(std::span<const Date> dates,
                                          std::span<const double> values) {
  if (dates.size() != values.size())
    throw std::invalid_argument("dates/values size mismatch");
  std::map<int, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    auto& [sum, n] = acc[dates[i].year()];
    sum += values[i];
    ++n;
  }
  std::vector<AnnualValue> out;
  for (const auto& [year, sn] : acc) {
    if (sn.second != static_cast<std::size_t>(days_in_year(year))) continue;
    out.push_back({year, sn.first / static_cast<double>(sn.second), sn.second});
  }
  return out;
}

std::vector<SeasonalValue> aggregate_seasonal(std::span<const Date> dates,
                                              std::span<const double> values) {
  if (dates.size() != values.size())
    throw std::invalid_argument("dates/values size mismatch");
  std::map<std::pair<int, int>, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    const int sy = season_year(dates[i]);
    const int s = static_cast<int>(season_of(dates[i]));
    auto& [sum, n] = acc[{sy, s}];
    sum += values[i];
    ++n;
  }
  std::vector<SeasonalValue> out;
  for (const auto& [key, sn] : acc) {
    const auto season = static_cast<Season>(key.second);
    if (sn.second != static_cast<std::size_t>(season_days(key.first, season)))
      continue;
    out.push_back({key.first, season, sn.first / static_cast<double>(sn.second),
                   sn.second});
  }
  return out;
}

}  // namespace snowtrend
