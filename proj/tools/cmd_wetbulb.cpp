#include <algorithm>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "snowtrend/dataset.hpp"
#include "snowtrend/thermo.hpp"

namespace snowtrend::cli {

namespace {

struct WetbulbOpts {
  std::string out;
  std::string t_air;
  std::string rh;
  std::string dewpoint;
  std::string pressure;
  double pressure_mb = 1013.25;
  double tol_k = 1e-6;
  int max_iter = 50;
};

void run_wetbulb(const WetbulbOpts& o, const GlobalOptions& global) {
  if (o.rh.empty() == o.dewpoint.empty())
    throw std::runtime_error("wetbulb needs exactly one of --rh and --dewpoint");
  const GridField t_air = read_dataset(o.t_air);

  GridField rh;
  std::size_t dewpoint_clamped = 0;
  if (!o.dewpoint.empty()) {
    ThermoFieldResult conv =
        rh_from_dewpoint_field(t_air, read_dataset(o.dewpoint));
    rh = std::move(conv.field);
    dewpoint_clamped = conv.clamped;
  } else {
    rh = read_dataset(o.rh);
  }

  GridField pressure;
  if (!o.pressure.empty()) {
    pressure = read_dataset(o.pressure);
  } else {
    pressure = make_field(t_air.grid, t_air.times, "mb", "pressure");
    std::fill(pressure.values.begin(), pressure.values.end(),
              static_cast<float>(o.pressure_mb));
  }

  const ThermoFieldResult wb = wet_bulb_field(t_air, rh, pressure, {}, o.tol_k,
                                              o.max_iter, global.threads);

  Manifest manifest(o.out, "wetbulb", global);
  write_dataset(wb.field, o.out + "/wet_bulb");
  manifest.add_output("wet_bulb");
  const nlohmann::json summary = {{"dewpoint_clamped", dewpoint_clamped},
                                  {"rh_clamped", wb.clamped}};
  atomic_write_text(o.out + "/summary.json", summary.dump(2) + "\n");
  manifest.add_output("summary.json");
  manifest.finish();
}

}  // namespace

void register_wetbulb(CLI::App& app, GlobalOptions& global) {
  auto o = std::make_shared<WetbulbOpts>();
  CLI::App* cmd = app.add_subcommand(
      "wetbulb", "Wet-bulb temperature from air temperature and humidity");
  cmd->fallthrough();
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--t-air", o->t_air, "Air temperature dataset, K")
      ->required();
  cmd->add_option("--rh", o->rh, "Relative humidity dataset, fraction");
  cmd->add_option("--dewpoint", o->dewpoint, "Dew-point dataset, K");
  cmd->add_option("--pressure", o->pressure, "Pressure dataset, mb");
  const auto* pmb = cmd->add_option("--pressure-mb", o->pressure_mb,
                                    "Constant pressure when no dataset, mb");
  const auto* tol = cmd->add_option("--tol-k", o->tol_k,
                                    "Newton residual tolerance, K");
  const auto* it = cmd->add_option("--max-iter", o->max_iter,
                                   "Newton/bisection iteration cap");

  cmd->callback([o, &global, pmb, tol, it]() {
    global.load();
    const nlohmann::json sec = global.section("wetbulb");
    cfg(pmb, sec, "pressure_mb", o->pressure_mb);
    cfg(tol, sec, "tol_k", o->tol_k);
    cfg(it, sec, "max_iter", o->max_iter);
    run_wetbulb(*o, global);
  });
}

}  // namespace snowtrend::cli
