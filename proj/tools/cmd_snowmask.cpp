#include <algorithm>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "snowtrend/csv.hpp"
#include "snowtrend/dataset.hpp"
#include "snowtrend/snowmask.hpp"

namespace snowtrend::cli {

namespace {

struct SnowmaskOpts {
  std::string out;
  std::string wet_bulb;
  std::string surface;
  double land_c = 1.0;
  double ocean_c = 1.1;
};

void run_snowmask(const SnowmaskOpts& o, const GlobalOptions& global) {
  const GridField wb = read_dataset(o.wet_bulb);
  const SurfaceMask surface = read_surface_mask(o.surface);
  const SnowMaskSeries series =
      potential_snow_mask(wb, surface, {o.land_c, o.ocean_c});

  Manifest manifest(o.out, "snowmask", global);
  write_dataset(series.mask, o.out + "/mask");
  manifest.add_output("mask");
  manifest.finish();
}

struct AreasOpts {
  std::string out;
  std::string mask;
  std::string surface;
  std::string hemisphere = "global";
  std::string surface_type = "any";
  std::string region;
};

void run_areas(const AreasOpts& o, const GlobalOptions& global) {
  const GridField mask = read_dataset(o.mask);
  const SurfaceMask surface = read_surface_mask(o.surface);
  const RegionSelector sel =
      make_selector(o.hemisphere, o.surface_type, o.region);
  const std::vector<double> areas = snow_area_km2(mask, surface, sel);

  CsvTable table;
  table.header = {"date", "area_km2"};
  for (std::size_t t = 0; t < areas.size(); ++t)
    table.rows.push_back({mask.times[t].to_string(), format_double(areas[t])});

  Manifest manifest(o.out, "areas", global);
  write_csv(o.out + "/areas.csv", table);
  manifest.add_output("areas.csv");
  manifest.finish();
}

struct ExceedanceOpts {
  std::string out;
  std::string mask;
  int first_year = 0;  // 0 = derive from the mask time axis
  int last_year = 0;
  double level = 0.5;
  bool aggregate = false;
};

void run_exceedance(const ExceedanceOpts& o, const GlobalOptions& global) {
  const GridField mask = read_dataset(o.mask);
  const int fy = o.first_year != 0 ? o.first_year : mask.times.front().year();
  const int ly = o.last_year != 0 ? o.last_year : mask.times.back().year();

  GridField freq;
  if (o.aggregate || fy == ly) {
    freq = exceedance_frequency(mask, fy, ly);
  } else {
    std::vector<Date> times;
    std::vector<float> values;
    for (int y = fy; y <= ly; ++y) {
      const GridField one = exceedance_frequency(mask, y, y);
      times.push_back(one.times.front());
      values.insert(values.end(), one.values.begin(), one.values.end());
    }
    freq = make_field(mask.grid, std::move(times), "fraction",
                      "snow_frequency");
    freq.values = std::move(values);
  }

  Manifest manifest(o.out, "exceedance", global);
  write_dataset(freq, o.out + "/frequency");
  manifest.add_output("frequency");
  write_dataset(exceedance_mask(freq, o.level), o.out + "/exceedance");
  manifest.add_output("exceedance");
  manifest.finish();
}

struct TransitionOpts {
  std::string out;
  std::string exceedance;
  double level = 0.5;
  double anchor = 0.0;
};

void run_transition(const TransitionOpts& o, const GlobalOptions& global) {
  const GridField ex = read_dataset(o.exceedance);

  CsvTable table;
  table.header = {"date",    "slice",        "lon_west", "lon_east",
                  "area_km2", "latitude_deg", "clamped"};
  std::vector<int> years;
  std::vector<std::array<double, kTransitionSlices>> latitudes;
  for (std::size_t t = 0; t < ex.ntimes(); ++t) {
    GridField layer = make_field(ex.grid, {ex.times[t]}, ex.units, ex.variable);
    const auto src = ex.layer(t);
    std::copy(src.begin(), src.end(), layer.values.begin());

    const auto areas = slice_areas_nh(layer, o.anchor);
    const TransitionLatitudes tl =
        transition_latitudes(areas, o.level, o.anchor);
    std::array<double, kTransitionSlices> lats{};
    for (int s = 0; s < kTransitionSlices; ++s) {
      const TransitionSlice& slice = tl.slices[s];
      lats[s] = slice.latitude_deg;
      table.rows.push_back({ex.times[t].to_string(), std::to_string(s),
                            format_double(slice.lon_west),
                            format_double(slice.lon_east),
                            format_double(slice.area_km2),
                            format_double(slice.latitude_deg),
                            slice.clamped ? "1" : "0"});
    }
    years.push_back(ex.times[t].year());
    latitudes.push_back(lats);
  }

  Manifest manifest(o.out, "transition", global);
  write_csv(o.out + "/transition.csv", table);
  manifest.add_output("transition.csv");

  if (ex.ntimes() >= 2 && classify_time_step(ex.times) == TimeStep::annual) {
    const auto rates = retraction_rates_deg_per_decade(years, latitudes);
    CsvTable rt;
    rt.header = {"slice", "lon_west", "lon_east", "rate_deg_per_decade"};
    for (int s = 0; s < kTransitionSlices; ++s) {
      const double west = normalize_lon(o.anchor + s * kSliceWidthDeg);
      const double east = normalize_lon(west + kSliceWidthDeg);
      rt.rows.push_back({std::to_string(s), format_double(west),
                         format_double(east), format_double(rates[s])});
    }
    write_csv(o.out + "/rates.csv", rt);
    manifest.add_output("rates.csv");
  }
  manifest.finish();
}

}  // namespace

void register_snowmask(CLI::App& app, GlobalOptions& global) {
  {
    auto o = std::make_shared<SnowmaskOpts>();
    CLI::App* cmd = app.add_subcommand(
        "snowmask", "Potential-snowfall mask from a wet-bulb dataset");
    cmd->fallthrough();
    cmd->add_option("--out", o->out, "Output directory")->required();
    cmd->add_option("--wet-bulb", o->wet_bulb, "Wet-bulb dataset, K or C")
        ->required();
    cmd->add_option("--surface", o->surface, "Surface mask directory")
        ->required();
    const auto* lc = cmd->add_option("--land-c", o->land_c,
                                     "Land threshold, deg C");
    const auto* oc = cmd->add_option("--ocean-c", o->ocean_c,
                                     "Ocean threshold, deg C");
    cmd->callback([o, &global, lc, oc]() {
      global.load();
      const nlohmann::json sec = global.section("snowmask");
      cfg(lc, sec, "land_c", o->land_c);
      cfg(oc, sec, "ocean_c", o->ocean_c);
      run_snowmask(*o, global);
    });
  }
  {
    auto o = std::make_shared<AreasOpts>();
    CLI::App* cmd = app.add_subcommand(
        "areas", "Masked snow area per time step, km^2");
    cmd->fallthrough();
    cmd->add_option("--out", o->out, "Output directory")->required();
    cmd->add_option("--mask", o->mask, "Snow mask dataset")->required();
    cmd->add_option("--surface", o->surface, "Surface mask directory")
        ->required();
    const auto* hemi = cmd->add_option("--hemisphere", o->hemisphere,
                                       "global, north or south");
    const auto* surf = cmd->add_option("--surface-type", o->surface_type,
                                       "any, land or ocean");
    const auto* reg = cmd->add_option("--region", o->region,
                                      "Named region constraint");
    cmd->callback([o, &global, hemi, surf, reg]() {
      global.load();
      const nlohmann::json sec = global.section("areas");
      cfg(hemi, sec, "hemisphere", o->hemisphere);
      cfg(surf, sec, "surface_type", o->surface_type);
      cfg(reg, sec, "region", o->region);
      run_areas(*o, global);
    });
  }
  {
    auto o = std::make_shared<ExceedanceOpts>();
    CLI::App* cmd = app.add_subcommand(
        "exceedance", "Snow-day frequency and exceedance mask");
    cmd->fallthrough();
    cmd->add_option("--out", o->out, "Output directory")->required();
    cmd->add_option("--mask", o->mask, "Daily snow mask dataset")->required();
    const auto* fy = cmd->add_option("--first-year", o->first_year,
                                     "First year (default: mask start)");
    const auto* ly = cmd->add_option("--last-year", o->last_year,
                                     "Last year (default: mask end)");
    const auto* lv = cmd->add_option("--level", o->level,
                                     "Exceedance frequency level");
    const auto* ag = cmd->add_flag(
        "--aggregate", o->aggregate,
        "One layer over the whole range instead of one per year");
    cmd->callback([o, &global, fy, ly, lv, ag]() {
      global.load();
      const nlohmann::json sec = global.section("exceedance");
      cfg(fy, sec, "first_year", o->first_year);
      cfg(ly, sec, "last_year", o->last_year);
      cfg(lv, sec, "level", o->level);
      cfg(ag, sec, "aggregate", o->aggregate);
      run_exceedance(*o, global);
    });
  }
  {
    auto o = std::make_shared<TransitionOpts>();
    CLI::App* cmd = app.add_subcommand(
        "transition", "Transition latitudes per longitude slice");
    cmd->fallthrough();
    cmd->add_option("--out", o->out, "Output directory")->required();
    cmd->add_option("--exceedance", o->exceedance,
                    "Exceedance mask dataset")
        ->required();
    const auto* lv = cmd->add_option("--level", o->level,
                                     "Exceedance level the mask encodes");
    const auto* an = cmd->add_option("--anchor", o->anchor,
                                     "Slice origin longitude, deg");
    cmd->callback([o, &global, lv, an]() {
      global.load();
      const nlohmann::json sec = global.section("transition");
      cfg(lv, sec, "level", o->level);
      cfg(an, sec, "anchor", o->anchor);
      run_transition(*o, global);
    });
  }
}

}  // namespace snowtrend::cli
