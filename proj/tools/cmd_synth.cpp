#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "snowtrend/csv.hpp"
#include "snowtrend/dataset.hpp"
#include "snowtrend/gauges.hpp"
#include "snowtrend/synth.hpp"
#include "snowtrend/trend.hpp"

namespace snowtrend::cli {

namespace {

struct SynthOpts {
  std::string out;
  double dlat = 7.5;
  double dlon = 7.5;
  double lat_start = -86.25;
  double lon_start = 3.75;
  int nlat = 24;
  int nlon = 48;
  int first_year = 2001;
  int years = 5;
  std::string step = "daily";
  double equator_c = 18.0;
  double pole_drop_c = 45.0;
  double trend = 0.0;
  std::vector<std::string> region_trends;
  double ar1_phi = 0.3;
  double ar1_sigma = 0.15;
  std::vector<double> sigmas = {1.47, 1.5, 2.69};
  double land_fraction = 0.5;
  bool no_bands = false;
  int stations = 40;
  std::string gauge_variable = "wet_bulb";
  double precip_mean = 4.0;
  double precip_sd = 3.0;
  bool pentad_precip = false;
};

std::pair<std::string, double> parse_region_trend(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::runtime_error("--region-trend expects name=rate, got '" + text +
                             "'");
  return {text.substr(0, eq), parse_double(text.substr(eq + 1))};
}

void run_synth(const SynthOpts& o, const GlobalOptions& global) {
  SyntheticSpec spec;
  spec.grid = {o.lat_start, o.lon_start, o.dlat, o.dlon, o.nlat, o.nlon};
  spec.first_year = o.first_year;
  spec.n_years = o.years;
  if (o.step == "daily") spec.step = TimeStep::daily;
  else if (o.step == "annual") spec.step = TimeStep::annual;
  else
    throw std::runtime_error("--step must be daily or annual, got '" + o.step +
                             "'");
  spec.equator_c = o.equator_c;
  spec.pole_drop_c = o.pole_drop_c;
  spec.trend_c_per_decade = o.trend;
  for (const std::string& rt : o.region_trends)
    spec.region_trends.push_back(parse_region_trend(rt));
  spec.ar1_phi = o.ar1_phi;
  spec.ar1_sigma = o.ar1_sigma;
  spec.product_sigmas = o.sigmas;
  spec.seed = global.seed;

  const SurfaceMask surface =
      make_synthetic_surface(spec.grid, o.land_fraction, !o.no_bands);
  const SyntheticData data = make_synthetic(spec, &surface);

  Manifest manifest(o.out, "synth", global);
  write_dataset(data.truth, o.out + "/truth");
  manifest.add_output("truth");
  for (std::size_t m = 0; m < data.products.size(); ++m) {
    const std::string name = "product" + std::to_string(m + 1);
    write_dataset(data.products[m], o.out + "/" + name);
    manifest.add_output(name);
  }
  write_surface_mask(surface, o.out + "/surface");
  manifest.add_output("surface");

  if (o.stations > 0) {
    const auto gauges = sample_truth_gauges(data.truth, o.stations,
                                            o.gauge_variable,
                                            splitmix64(global.seed + 1));
    write_gauge_csv(o.out + "/gauges.csv", gauges);
    manifest.add_output("gauges.csv");
    const auto precip = sample_precip_gauges(data.truth, surface, {},
                                             o.stations, o.precip_mean,
                                             o.precip_sd,
                                             splitmix64(global.seed + 2));
    write_gauge_csv(o.out + "/precip_gauges.csv", precip);
    manifest.add_output("precip_gauges.csv");
  }
  if (o.pentad_precip) {
    const GridField pentads = make_synthetic_pentad_precip(
        spec.grid, o.first_year, o.years, o.precip_mean, o.precip_sd,
        splitmix64(global.seed + 3));
    write_dataset(pentads, o.out + "/pentad_precip");
    manifest.add_output("pentad_precip");
  }
  manifest.finish();
}

}  // namespace

void register_synth(CLI::App& app, GlobalOptions& global) {
  auto o = std::make_shared<SynthOpts>();
  CLI::App* cmd =
      app.add_subcommand("synth", "Generate a synthetic wet-bulb world");
  cmd->fallthrough();
  cmd->add_option("--out", o->out, "Output directory")->required();
  const auto* dlat = cmd->add_option("--dlat", o->dlat, "Grid spacing, deg");
  const auto* dlon = cmd->add_option("--dlon", o->dlon, "Grid spacing, deg");
  const auto* lat0 = cmd->add_option("--lat-start", o->lat_start,
                                     "First row center latitude");
  const auto* lon0 = cmd->add_option("--lon-start", o->lon_start,
                                     "First column center longitude");
  const auto* nlat = cmd->add_option("--nlat", o->nlat, "Latitude rows");
  const auto* nlon = cmd->add_option("--nlon", o->nlon, "Longitude columns");
  const auto* fy = cmd->add_option("--first-year", o->first_year, "First year");
  const auto* ny = cmd->add_option("--years", o->years, "Number of years");
  const auto* step = cmd->add_option("--step", o->step, "daily or annual");
  const auto* eq = cmd->add_option("--equator-c", o->equator_c,
                                   "Climatology at the equator, deg C");
  const auto* pd = cmd->add_option("--pole-drop-c", o->pole_drop_c,
                                   "Equator-to-pole decrease, deg C");
  const auto* tr = cmd->add_option("--trend", o->trend,
                                   "Imposed trend, deg C per decade");
  const auto* rt = cmd->add_option("--region-trend", o->region_trends,
                                   "Region override as name=rate (repeatable)");
  const auto* phi = cmd->add_option("--ar1-phi", o->ar1_phi,
                                    "AR(1) coefficient of the shared noise");
  const auto* sig = cmd->add_option("--ar1-sigma", o->ar1_sigma,
                                    "AR(1) innovation standard deviation");
  const auto* ps = cmd->add_option("--sigmas", o->sigmas,
                                   "Per-product noise sigmas")
                       ->delimiter(',');
  const auto* lf = cmd->add_option("--land-fraction", o->land_fraction,
                                   "Longitude fraction that is land");
  const auto* nb = cmd->add_flag("--no-bands", o->no_bands,
                                 "Skip the climate-band region labels");
  const auto* st = cmd->add_option("--stations", o->stations,
                                   "Gauge stations (0 disables gauges)");
  const auto* gv = cmd->add_option("--gauge-variable", o->gauge_variable,
                                   "Variable name on truth gauge records");
  const auto* pm = cmd->add_option("--precip-mean", o->precip_mean,
                                   "Mean precipitation, mm");
  const auto* pq = cmd->add_option("--precip-sd", o->precip_sd,
                                   "Precipitation standard deviation, mm");
  const auto* pp = cmd->add_flag("--pentad-precip", o->pentad_precip,
                                 "Also write a pentad precipitation cube");

  cmd->callback([o, &global, dlat, dlon, lat0, lon0, nlat, nlon, fy, ny, step,
                 eq, pd, tr, rt, phi, sig, ps, lf, nb, st, gv, pm, pq, pp]() {
    global.load();
    const nlohmann::json sec = global.section("synth");
    cfg(dlat, sec, "dlat", o->dlat);
    cfg(dlon, sec, "dlon", o->dlon);
    cfg(lat0, sec, "lat_start", o->lat_start);
    cfg(lon0, sec, "lon_start", o->lon_start);
    cfg(nlat, sec, "nlat", o->nlat);
    cfg(nlon, sec, "nlon", o->nlon);
    cfg(fy, sec, "first_year", o->first_year);
    cfg(ny, sec, "years", o->years);
    cfg(step, sec, "step", o->step);
    cfg(eq, sec, "equator_c", o->equator_c);
    cfg(pd, sec, "pole_drop_c", o->pole_drop_c);
    cfg(tr, sec, "trend", o->trend);
    cfg(rt, sec, "region_trends", o->region_trends);
    cfg(phi, sec, "ar1_phi", o->ar1_phi);
    cfg(sig, sec, "ar1_sigma", o->ar1_sigma);
    cfg(ps, sec, "sigmas", o->sigmas);
    cfg(lf, sec, "land_fraction", o->land_fraction);
    cfg(nb, sec, "no_bands", o->no_bands);
    cfg(st, sec, "stations", o->stations);
    cfg(gv, sec, "gauge_variable", o->gauge_variable);
    cfg(pm, sec, "precip_mean", o->precip_mean);
    cfg(pq, sec, "precip_sd", o->precip_sd);
    cfg(pp, sec, "pentad_precip", o->pentad_precip);
    run_synth(*o, global);
  });
}

}  // namespace snowtrend::cli
