#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace snowtrend {

// Proleptic Gregorian calendar date, stored as days since 1970-01-01.
class Date {
public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);

  static Date from_serial(std::int64_t days);
  // Parses "YYYY-MM-DD"; throws std::invalid_argument on anything else.
  static Date parse(const std::string& iso);

  std::string to_string() const;

  int year() const;
  unsigned month() const;
  unsigned day() const;
  int day_of_year() const;  // 1-based
  std::int64_t serial() const { return serial_; }

  Date operator+(int days) const { return from_serial(serial_ + days); }
  std::int64_t operator-(const Date& o) const { return serial_ - o.serial_; }
  auto operator<=>(const Date&) const = default;

private:
  std::int64_t serial_ = 0;
};

bool is_leap_year(int year);
int days_in_year(int year);
int days_in_month(int year, unsigned month);

enum class Season { djf, mam, jja, son };

std::string season_name(Season s);

// Meteorological season; December belongs to the following winter, so DJF
// carries the year of its January/February part.
Season season_of(const Date& d);
int season_year(const Date& d);

enum class TimeStep { single, daily, pentad, annual, irregular };

// Classifies a strictly increasing time axis. "pentad" means consecutive
// pentad start dates, "annual" means January 1 stamps (gaps allowed).
TimeStep classify_time_step(std::span<const Date> times);

constexpr int kPentadsPerYear = 73;

// Fixed-calendar pentad window: first day-of-year (1-based) and length.
// Pentads are 5 days; the last one absorbs day 366 in leap years.
struct PentadWindow {
  int first_doy;
  int length;
};
PentadWindow pentad_window(int year, int pentad);

// Pentad index of a date within its year, in [0, kPentadsPerYear).
int pentad_of(const Date& d);

struct AnnualValue {
  int year;
  double value;
  std::size_t n_days;
};

struct SeasonalValue {
  int year;
  Season season;
  double value;
  std::size_t n_days;
};

// Mean of a daily series per calendar year / meteorological season. Only
// complete groups (every calendar day present and finite) are returned, so
// a winter missing its leading December is dropped.
std::vector<AnnualValue> aggregate_annual(std::span<const Date> dates,
                                          std::span<const double> values);
std::vector<SeasonalValue> aggregate_seasonal(std::span<const Date> dates,
                                              std::span<const double> values);

}  // namespace snowtrend
