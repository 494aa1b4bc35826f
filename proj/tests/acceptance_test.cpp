// Acceptance sweep: one PASS/FAIL line per criterion, nonzero exit on any
// failure. argv[1] must point at the pipeline binary (used by criterion 10).
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "snowtrend/calendar.hpp"
#include "snowtrend/ensemble.hpp"
#include "snowtrend/field.hpp"
#include "snowtrend/grid.hpp"
#include "snowtrend/metrics.hpp"
#include "snowtrend/snowmask.hpp"
#include "snowtrend/spr.hpp"
#include "snowtrend/synth.hpp"
#include "snowtrend/thermo.hpp"
#include "snowtrend/trend.hpp"

using namespace snowtrend;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

float nanf32() { return std::numeric_limits<float>::quiet_NaN(); }

void report(int k, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", k, detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

GeoGrid global_grid(double step) {
  return {-90.0 + step / 2.0, step / 2.0, step, step,
          static_cast<int>(std::lround(180.0 / step)),
          static_cast<int>(std::lround(360.0 / step))};
}

// --- 1: Newton wet bulb against a bisection oracle ------------------------

double bisect_wet_bulb(const AtmosState& state) {
  double lo = state.t_air_k - 60.0;
  double hi = state.t_air_k;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (wet_bulb_residual(mid, state) > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> t_air(230.0, 320.0);
  std::uniform_real_distribution<double> rh(0.05, 1.0);
  std::uniform_real_distribution<double> pressure(500.0, 1050.0);
  double max_diff = 0.0;
  double max_sat = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const AtmosState state{t_air(rng), rh(rng), pressure(rng)};
    max_diff = std::max(max_diff,
                        std::fabs(wet_bulb(state) - bisect_wet_bulb(state)));
    const AtmosState saturated{state.t_air_k, 1.0, state.pressure_mb};
    max_sat = std::max(max_sat,
                       std::fabs(wet_bulb(saturated) - saturated.t_air_k));
  }
  const double dt = seconds_since(t0);
  report(1, max_diff <= 1e-4 && max_sat <= 1e-6 && dt < 1.0,
         fmt("wet-bulb Newton vs bisection: max |diff| %.2e K, saturation "
             "|T_w-T_a| %.2e K, %.2f s",
             max_diff, max_sat, dt));
}

// --- 2: inverse-variance closed form and Monte-Carlo fusion ---------------

void criterion2() {
  const std::vector<double> sigmas = {1.47, 1.50, 2.69};
  const ErrorModel model = ml_weights(sigmas);
  const double closed =
      1.0 / std::sqrt(1.0 / (1.47 * 1.47) + 1.0 / (1.50 * 1.50) +
                      1.0 / (2.69 * 2.69));
  const bool form_ok = std::fabs(model.theoretical_sigma - closed) <= 1e-12 &&
                       std::fabs(model.theoretical_sigma - 0.978) <= 5e-4 &&
                       std::fabs(model.theoretical_sigma - 0.96) <= 0.02;

  // 10^5 zero-truth pixels: the fused noise spread must match the theory.
  const GeoGrid grid{-49.8, 0.45, 0.2, 0.9, 500, 200};
  std::mt19937_64 rng(202);
  std::vector<GridField> products;
  for (const double s : sigmas) {
    GridField f = make_field(grid, {Date(2001, 1, 1)}, "K", "wet_bulb");
    std::normal_distribution<double> noise(0.0, s);
    for (float& v : f.values) v = static_cast<float>(noise(rng));
    products.push_back(std::move(f));
  }
  const GridField fused = ensemble_mean(products, model);
  double sum = 0.0;
  double sum2 = 0.0;
  for (const float v : fused.values) {
    sum += v;
    sum2 += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(fused.values.size());
  const double sd = std::sqrt((sum2 - sum * sum / n) / (n - 1.0));
  const bool mc_ok = std::fabs(sd - model.theoretical_sigma) <=
                     0.05 * model.theoretical_sigma;
  report(2, form_ok && mc_ok,
         fmt("ensemble sigma: closed form %.4f K (targets 0.978 and 0.96), "
             "Monte-Carlo n=1e5 %.4f K",
             model.theoretical_sigma, sd));
}

// --- 3: Theil-Sen / Mann-Kendall against brute force -----------------------

double oracle_theil_sen(const AnnualSeries& s) {
  std::vector<double> slopes;
  for (std::size_t i = 0; i < s.years.size(); ++i)
    for (std::size_t j = i + 1; j < s.years.size(); ++j)
      slopes.push_back((s.values[j] - s.values[i]) /
                       static_cast<double>(s.years[j] - s.years[i]));
  std::sort(slopes.begin(), slopes.end());
  const std::size_t m = slopes.size() / 2;
  return slopes.size() % 2 ? slopes[m] : 0.5 * (slopes[m - 1] + slopes[m]);
}

long long oracle_mk_s(const std::vector<double>& v) {
  long long s = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      s += (v[j] > v[i]) - (v[j] < v[i]);
  return s;
}

void criterion3() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> len(3, 50);
  std::uniform_int_distribution<int> lattice(0, 8);  // ties guaranteed
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    AnnualSeries s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      s.years.push_back(1970 + i);
      s.values.push_back(0.5 * lattice(rng));
    }
    if (theil_sen(s) != oracle_theil_sen(s)) ++mismatches;
    if (mk_statistic(s.values) != oracle_mk_s(s.values)) ++mismatches;
  }
  std::vector<double> distinct;
  for (int i = 0; i < 10; ++i) distinct.push_back(i);
  const double var10 = mk_variance(distinct);
  report(3, mismatches == 0 && var10 == 125.0,
         fmt("Theil-Sen and MK S exact on 200 tied series; Var(S) n=10 = %g",
             var10));
}

// --- 4: moving-block bootstrap calibration ---------------------------------

void criterion4() {
  const auto t0 = Clock::now();
  MbbOptions opt;
  opt.b_replicates = 3000;
  int reject_white = 0;
  int reject_ar1 = 0;
  for (int trial = 0; trial < 200; ++trial) {
    AnnualSeries white;
    AnnualSeries red;
    std::mt19937_64 rng(splitmix64(4000 + trial));
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::vector<double> ar1 =
        make_ar1(100, 0.5, 1.0, splitmix64(5000 + trial));
    for (int i = 0; i < 100; ++i) {
      white.years.push_back(1900 + i);
      white.values.push_back(noise(rng));
      red.years.push_back(1900 + i);
      red.values.push_back(ar1[i]);
    }
    opt.seed = splitmix64(6000 + trial);
    if (mbb_mk_test(white, opt).significant) ++reject_white;
    if (mbb_mk_test(red, opt).significant) ++reject_ar1;
  }
  const double rate_white = reject_white / 200.0;
  const double rate_ar1 = reject_ar1 / 200.0;
  const double dt = seconds_since(t0);
  report(4,
         rate_white >= 0.02 && rate_white <= 0.09 && rate_ar1 <= 0.12 &&
             dt < 120.0,
         fmt("MBB rejection at alpha=0.05: white %.3f (want 0.02-0.09), "
             "AR(1) phi=0.5 %.3f (want <= 0.12), %.1f s",
             rate_white, rate_ar1, dt));
}

// --- 5: trend recovery under AR(1) noise -----------------------------------

void criterion5() {
  MbbOptions opt;
  opt.b_replicates = 2000;
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> noise =
        make_ar1(39, 0.3, 0.15, splitmix64(7000 + trial));
    AnnualSeries s;
    for (int i = 0; i < 39; ++i) {
      s.years.push_back(1979 + i);
      s.values.push_back(0.034 * i + noise[i]);
    }
    opt.seed = splitmix64(8000 + trial);
    const TrendReport r = mbb_mk_test(s, opt);
    if (std::fabs(r.slope * 10.0 - 0.34) <= 0.08 && r.significant) ++good;
  }
  report(5, good >= 95,
         fmt("trend recovery 0.34 K/decade under AR(1): %d/100 trials within "
             "0.08 and significant",
             good));
}

// --- 6: spherical geometry --------------------------------------------------

void criterion6() {
  constexpr double sphere = 4.0 * std::numbers::pi * kEarthRadiusKm *
                            kEarthRadiusKm;
  const GeoGrid g25 = global_grid(2.5);
  double total = 0.0;
  for (int i = 0; i < g25.nlat; ++i) total += cell_area_km2(g25, i) * g25.nlon;
  const double closure = std::fabs(total - sphere) / sphere;

  // 1-degree grid offset from the 60 N edge: cap area lands within one ring.
  GeoGrid g1 = global_grid(1.0);
  g1.lat_start = -89.75;
  GridField mask = make_field(g1, {Date(2001, 1, 1)}, "flag", "snow_mask");
  SurfaceMask surface{g1, std::vector<std::uint8_t>(g1.size(), 1), {}, {}};
  for (int i = 0; i < g1.nlat; ++i)
    for (int j = 0; j < g1.nlon; ++j)
      mask.at(0, i, j) = g1.lat(i) >= 60.0 ? 1.0f : 0.0f;
  const double cap = snow_area_km2(mask, surface, {})[0];
  const double exact = 2.0 * std::numbers::pi * kEarthRadiusKm *
                       kEarthRadiusKm *
                       (1.0 - std::sin(60.0 * std::numbers::pi / 180.0));
  int ring_row = 0;
  while (g1.lat(ring_row) < 60.0) ++ring_row;
  const double ring = cell_area_km2(g1, ring_row) * g1.nlon;
  const bool cap_ok = std::fabs(cap - exact) <= ring;

  const auto slice_areas = slice_areas_nh(mask);
  const TransitionLatitudes tl = transition_latitudes(slice_areas, 0.5);
  bool slices_ok = true;
  for (const TransitionSlice& s : tl.slices)
    if (std::fabs(s.latitude_deg - 60.0) > g1.dlat || s.clamped)
      slices_ok = false;

  report(6, closure <= 1e-4 && cap_ok && slices_ok,
         fmt("area closure %.1e relative; 60N cap off by %.0f km^2 "
             "(<= one ring %.0f); 24 slice latitudes at %.2f deg",
             closure, std::fabs(cap - exact), ring, tl.slices[0].latitude_deg));
}

// --- 7: SPR identities -------------------------------------------------------

void criterion7() {
  const GeoGrid grid{10.0, 5.0, 1.0, 1.0, 1, 1};
  const int year = 2001;
  std::vector<Date> days;
  for (int d = 0; d < days_in_year(year); ++d)
    days.push_back(Date(year, 1, 1) + d);
  std::vector<Date> pentads;
  for (int p = 0; p < kPentadsPerYear; ++p)
    pentads.push_back(Date(year, 1, 1) + (pentad_window(year, p).first_doy - 1));

  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> rain(0.5, 9.5);
  GridField precip = make_field(grid, pentads, "mm", "precip");
  for (float& v : precip.values) v = static_cast<float>(rain(rng));

  auto daily_mask = [&](auto value_at) {
    GridField m = make_field(grid, days, "flag", "snow_mask");
    for (std::size_t t = 0; t < m.ntimes(); ++t)
      m.values[t] = value_at(static_cast<int>(t));
    return m;
  };

  const GridField all_snow = daily_mask([](int) { return 1.0f; });
  const GridField no_snow = daily_mask([](int) { return 0.0f; });
  // Two snow days out of every five: constant pentad frequency 0.4.
  const GridField two_in_five =
      daily_mask([&](int t) { return days[t].day_of_year() % 5 < 2 ? 1.0f : 0.0f; });

  auto spr_of = [&](const GridField& m, const GridField& p) {
    return annual_spr(snow_frequency_pentads(m, year).freq, p, year)
        .spr.values[0];
  };
  const bool ones_ok = spr_of(all_snow, precip) == 1.0f;
  const bool zeros_ok = spr_of(no_snow, precip) == 0.0f;
  const bool const_ok =
      std::fabs(spr_of(two_in_five, precip) - 0.4) <= 1e-6;

  bool scaling_ok = true;
  const float base = spr_of(two_in_five, precip);
  for (const double c : {0.1, 1.0, 10.0}) {
    GridField scaled = precip;
    for (float& v : scaled.values) v = static_cast<float>(v * c);
    if (std::fabs(spr_of(two_in_five, scaled) - base) > 1e-6)
      scaling_ok = false;
  }

  // Hand case from two usable pentads: (f=1, P=10), (f=0, P=30) -> 10/40.
  GridField freq2 = make_field(grid, pentads, "fraction", "snow_frequency_pentad");
  GridField precip2 = make_field(grid, pentads, "mm", "precip");
  freq2.values[0] = 1.0f;
  freq2.values[1] = 0.0f;
  precip2.values[0] = 10.0f;
  precip2.values[1] = 30.0f;
  const float hand = annual_spr(freq2, precip2, year).spr.values[0];

  report(7,
         ones_ok && zeros_ok && const_ok && scaling_ok && hand == 0.25f,
         fmt("SPR identities: all-snow 1, no-snow 0, constant-f, x{0.1,1,10} "
             "scaling, hand case %.4f",
             static_cast<double>(hand)));
}

// --- 8: exceedance nesting ----------------------------------------------------

void criterion8() {
  const GeoGrid grid{-75.0, 15.0, 30.0, 45.0, 6, 8};
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int year = 1991 + trial % 40;
    std::mt19937_64 rng(splitmix64(9000 + trial));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Date> days;
    for (int d = 0; d < days_in_year(year); ++d)
      days.push_back(Date(year, 1, 1) + d);
    GridField mask = make_field(grid, days, "flag", "snow_mask");
    for (float& v : mask.values) {
      const double x = u(rng);
      v = x < 0.05 ? nanf32() : (x < 0.55 ? 1.0f : 0.0f);
    }
    const GridField freq = exceedance_frequency(mask, year, year);
    const GridField m25 = exceedance_mask(freq, 0.25);
    const GridField m50 = exceedance_mask(freq, 0.50);
    const GridField m75 = exceedance_mask(freq, 0.75);
    for (std::size_t p = 0; p < freq.values.size(); ++p) {
      if (m75.values[p] == 1.0f && m50.values[p] != 1.0f) ++violations;
      if (m50.values[p] == 1.0f && m25.values[p] != 1.0f) ++violations;
    }
  }
  report(8, violations == 0,
         fmt("exceedance nesting over 100 random years: %d violations",
             violations));
}

// --- 9: contingency metrics ---------------------------------------------------

void criterion9() {
  std::vector<bool> est;
  std::vector<bool> obs;
  auto add = [&](int n, bool e, bool o) {
    for (int i = 0; i < n; ++i) {
      est.push_back(e);
      obs.push_back(o);
    }
  };
  add(9, true, true);    // hits
  add(1, false, true);   // misses
  add(4, true, false);   // false alarms
  add(6, false, false);  // correct negatives
  const ContingencyCounts c = contingency(est, obs);
  const bool ok = pod(c) == 9.0 / 10.0 && far(c) == 4.0 / 13.0 &&
                  csi(c) == 9.0 / 14.0;
  report(9, ok,
         fmt("contingency (9,1,4): POD %.3f, FAR %.3f, CSI %.3f", pod(c),
             far(c), csi(c)));
}

// --- 10: byte-identical pipeline reruns ----------------------------------------

std::string read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree_bytes(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(root))
    if (entry.is_regular_file())
      out[std::filesystem::relative(entry.path(), root).string()] =
          read_raw(entry.path());
  return out;
}

void criterion10(const char* cli_arg) {
  if (cli_arg == nullptr) {
    report(10, false, "pipeline binary path missing (pass it as argv[1])");
    return;
  }
  const std::string cli = std::filesystem::absolute(cli_arg).string();
  const std::vector<std::string> steps = {
      "--seed 42 synth --out syn --years 3 --trend 0.4 --pentad-precip",
      "--seed 42 fuse --out fus --products syn/product1,syn/product2,"
      "syn/product3 --gauges syn/gauges.csv",
      "snowmask --out msk --wet-bulb fus/fused --surface syn/surface",
      "areas --out ar --mask msk/mask --surface syn/surface "
      "--hemisphere north",
      "exceedance --out exc --mask msk/mask --level 0.5",
      "transition --out tra --exceedance exc/exceedance --level 0.5",
      "spr --out sp --mask msk/mask --precip syn/pentad_precip",
      "--seed 42 trend --out tr --mean-of syn/product1,syn/product2,"
      "syn/product3 --surface syn/surface --hemisphere north "
      "--surface-type land --b-replicates 500",
      "validate --out val --estimates fus/fused --gauges "
      "syn/precip_gauges.csv --surface syn/surface",
  };

  const auto base = std::filesystem::temp_directory_path() /
                    ("snowtrend_accept_" + std::to_string(::getpid()));
  std::filesystem::remove_all(base);
  bool ran_ok = true;
  for (const char* leg : {"a", "b"}) {
    const auto dir = base / leg;
    std::filesystem::create_directories(dir);
    for (const std::string& step : steps) {
      const std::string cmd = "cd " + dir.string() + " && " + cli + " " +
                              step + " >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) ran_ok = false;
    }
  }
  std::size_t files = 0;
  bool identical = false;
  if (ran_ok) {
    const auto ta = tree_bytes(base / "a");
    const auto tb = tree_bytes(base / "b");
    files = ta.size();
    identical = !ta.empty() && ta == tb;
  }
  std::filesystem::remove_all(base);
  report(10, ran_ok && identical,
         ran_ok ? fmt("pipeline rerun byte-identical across %zu files", files)
                : std::string("a pipeline step exited nonzero"));
}

}  // namespace

int main(int argc, char** argv) {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(argc > 1 ? argv[1] : nullptr);
  return g_failures == 0 ? 0 : 1;
}
