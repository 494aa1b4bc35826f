#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "snowtrend/dataset.hpp"
#include "snowtrend/ensemble.hpp"
#include "snowtrend/gauges.hpp"
#include "snowtrend/metrics.hpp"

namespace snowtrend::cli {

namespace {

struct ValidateOpts {
  std::string out;
  std::string estimates;
  std::string gauges;
  std::string variable = "wet_bulb";
  std::string surface;
  double land_c = 1.0;
  double ocean_c = 1.1;
};

nlohmann::json score_or_null(double (*score)(const ContingencyCounts&),
                             const ContingencyCounts& c) {
  try {
    return score(c);
  } catch (const std::domain_error&) {
    return nullptr;
  }
}

void run_validate(const ValidateOpts& o, const GlobalOptions& global) {
  const GridField est = read_dataset(o.estimates);
  const auto records = read_gauge_csv(o.gauges);
  nlohmann::json metrics;

  const GaugeMatchupSet matchups =
      build_matchups(records, o.variable, std::span<const GridField>(&est, 1));
  if (!matchups.rows.empty()) {
    std::vector<double> e;
    std::vector<double> g;
    for (const Matchup& row : matchups.rows) {
      if (std::isnan(row.products[0])) continue;
      e.push_back(row.products[0]);
      g.push_back(row.gauge);
    }
    metrics["continuous"] = {{"variable", o.variable},
                             {"n", e.size()},
                             {"r2", r2(e, g)},
                             {"rbias_percent", rbias_percent(e, g)}};
  }

  if (!o.surface.empty()) {
    const SurfaceMask surface = read_surface_mask(o.surface);
    double offset = 0.0;
    if (est.units == "K") offset = 273.15;
    else if (est.units != "C")
      throw std::runtime_error("validate: estimates units must be K or C, got '"
                               + est.units + "'");

    std::unordered_map<std::int64_t, std::size_t> time_index;
    for (std::size_t t = 0; t < est.ntimes(); ++t)
      time_index[est.times[t].serial()] = t;

    std::vector<bool> predicted;
    std::vector<bool> observed;
    for (const GaugeRecord& rec : records) {
      if (rec.variable != "phase") continue;
      const auto it = time_index.find(rec.date.serial());
      if (it == time_index.end()) continue;
      const std::size_t p = nearest_pixel(est.grid, rec.lat, rec.lon);
      const float v = est.values[it->second * est.grid.size() + p];
      if (std::isnan(v)) continue;
      const std::size_t sp = nearest_pixel(surface.grid, rec.lat, rec.lon);
      const double cut = (surface.surface[sp] ? o.land_c : o.ocean_c) + offset;
      predicted.push_back(v <= cut);
      observed.push_back(rec.phase == "snow" || rec.phase == "mixed");
    }
    if (!predicted.empty()) {
      const ContingencyCounts c = contingency(predicted, observed);
      metrics["categorical"] = {{"n", predicted.size()},
                                {"hits", c.hits},
                                {"misses", c.misses},
                                {"false_alarms", c.false_alarms},
                                {"correct_negatives", c.correct_negatives},
                                {"pod", score_or_null(pod, c)},
                                {"far", score_or_null(far, c)},
                                {"csi", score_or_null(csi, c)}};
    }
  }

  if (!metrics.contains("continuous") && !metrics.contains("categorical"))
    throw std::runtime_error("validate: no overlapping gauge records");

  Manifest manifest(o.out, "validate", global);
  atomic_write_text(o.out + "/metrics.json", metrics.dump(2) + "\n");
  manifest.add_output("metrics.json");
  manifest.finish();
}

}  // namespace

void register_validate(CLI::App& app, GlobalOptions& global) {
  auto o = std::make_shared<ValidateOpts>();
  CLI::App* cmd = app.add_subcommand(
      "validate", "Score gridded estimates against gauge records");
  cmd->fallthrough();
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--estimates", o->estimates, "Estimate dataset directory")
      ->required();
  cmd->add_option("--gauges", o->gauges, "Gauge CSV")->required();
  const auto* var = cmd->add_option("--variable", o->variable,
                                    "Continuous gauge variable to score");
  cmd->add_option("--surface", o->surface,
                  "Surface mask directory (enables phase scores)");
  const auto* lc = cmd->add_option("--land-c", o->land_c,
                                   "Land snow threshold, deg C");
  const auto* oc = cmd->add_option("--ocean-c", o->ocean_c,
                                   "Ocean snow threshold, deg C");

  cmd->callback([o, &global, var, lc, oc]() {
    global.load();
    const nlohmann::json sec = global.section("validate");
    cfg(var, sec, "variable", o->variable);
    cfg(lc, sec, "land_c", o->land_c);
    cfg(oc, sec, "ocean_c", o->ocean_c);
    run_validate(*o, global);
  });
}

}  // namespace snowtrend::cli
