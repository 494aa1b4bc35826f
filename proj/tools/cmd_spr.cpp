#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "snowtrend/dataset.hpp"
#include "snowtrend/spr.hpp"

namespace snowtrend::cli {

namespace {

struct SprOpts {
  std::string out;
  std::string mask;
  std::string precip;
  int first_year = 0;  // 0 = derive from the mask time axis
  int last_year = 0;
};

GridField extract_year(const GridField& cube, int year) {
  std::vector<Date> times;
  std::vector<std::size_t> layers;
  for (std::size_t t = 0; t < cube.ntimes(); ++t)
    if (cube.times[t].year() == year) {
      times.push_back(cube.times[t]);
      layers.push_back(t);
    }
  if (times.empty())
    throw std::runtime_error("spr: precipitation has no layers for " +
                             std::to_string(year));
  GridField out = make_field(cube.grid, std::move(times), cube.units,
                             cube.variable);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto src = cube.layer(layers[k]);
    std::copy(src.begin(), src.end(), out.layer(k).begin());
  }
  return out;
}

void run_spr(const SprOpts& o, const GlobalOptions& global) {
  const GridField mask = read_dataset(o.mask);
  const GridField precip = read_dataset(o.precip);
  const int fy = o.first_year != 0 ? o.first_year : mask.times.front().year();
  const int ly = o.last_year != 0 ? o.last_year : mask.times.back().year();

  std::vector<Date> times;
  std::vector<float> values;
  nlohmann::json years = nlohmann::json::array();
  for (int y = fy; y <= ly; ++y) {
    const PentadFrequency freq = snow_frequency_pentads(mask, y);
    const AnnualSprResult annual =
        annual_spr(freq.freq, extract_year(precip, y), y);
    times.push_back(annual.spr.times.front());
    values.insert(values.end(), annual.spr.values.begin(),
                  annual.spr.values.end());
    years.push_back({{"year", y},
                     {"incomplete_pentads", freq.incomplete},
                     {"dry_pixels", annual.dry_pixels}});
  }
  GridField spr = make_field(mask.grid, std::move(times), "fraction", "spr");
  spr.values = std::move(values);

  Manifest manifest(o.out, "spr", global);
  write_dataset(spr, o.out + "/spr");
  manifest.add_output("spr");
  const nlohmann::json summary = {{"years", years}};
  atomic_write_text(o.out + "/summary.json", summary.dump(2) + "\n");
  manifest.add_output("summary.json");
  manifest.finish();
}

}  // namespace

void register_spr(CLI::App& app, GlobalOptions& global) {
  auto o = std::make_shared<SprOpts>();
  CLI::App* cmd = app.add_subcommand(
      "spr", "Annual snowfall-to-precipitation ratio");
  cmd->fallthrough();
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--mask", o->mask, "Daily snow mask dataset")->required();
  cmd->add_option("--precip", o->precip, "Pentad precipitation dataset")
      ->required();
  const auto* fy = cmd->add_option("--first-year", o->first_year,
                                   "First year (default: mask start)");
  const auto* ly = cmd->add_option("--last-year", o->last_year,
                                   "Last year (default: mask end)");

  cmd->callback([o, &global, fy, ly]() {
    global.load();
    const nlohmann::json sec = global.section("spr");
    cfg(fy, sec, "first_year", o->first_year);
    cfg(ly, sec, "last_year", o->last_year);
    run_spr(*o, global);
  });
}

}  // namespace snowtrend::cli
