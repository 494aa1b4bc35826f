#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "snowtrend/csv.hpp"
#include "snowtrend/dataset.hpp"
#include "snowtrend/trend.hpp"

namespace snowtrend::cli {

namespace {

struct TrendOpts {
  std::string out;
  std::string series;
  std::string fields;
  std::vector<std::string> mean_of;
  std::string surface;
  std::string hemisphere = "global";
  std::string surface_type = "any";
  std::string region;
  double alpha = 0.05;
  int b_replicates = 3000;
  int block_length = 0;
  bool detrend_first = false;
  int min_years = 10;
};

AnnualSeries read_series_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t yc = table.column("year");
  const std::size_t vc = table.column("value");
  AnnualSeries series;
  for (const auto& row : table.rows) {
    series.years.push_back(parse_int(row[yc]));
    series.values.push_back(parse_double(row[vc]));
  }
  return series;
}

// Area-weighted mean series, aggregated to annual when the input is daily.
AnnualSeries annual_mean_series(const GridField& field,
                                const SurfaceMask& surface,
                                const RegionSelector& sel) {
  const std::vector<double> means = area_weighted_mean(field, surface, sel);
  AnnualSeries series;
  if (classify_time_step(field.times) == TimeStep::daily) {
    for (const AnnualValue& a : aggregate_annual(field.times, means)) {
      series.years.push_back(a.year);
      series.values.push_back(a.value);
    }
  } else {
    for (std::size_t t = 0; t < field.ntimes(); ++t) {
      series.years.push_back(field.times[t].year());
      series.values.push_back(means[t]);
    }
  }
  return series;
}

nlohmann::json report_json(const TrendReport& r) {
  return {{"slope_per_year", r.slope},
          {"slope_per_decade", r.slope * 10.0},
          {"mk_s", r.mk_s},
          {"mk_var", r.mk_var},
          {"z", r.z},
          {"p_bootstrap", r.p_bootstrap},
          {"significant", r.significant},
          {"alpha", r.alpha},
          {"autocorr_r", r.autocorr_r},
          {"block_length", r.block_length},
          {"b_replicates", r.b_replicates},
          {"n_years", r.n_years}};
}

void run_trend(const TrendOpts& o, const GlobalOptions& global) {
  const int modes = !o.series.empty() + !o.fields.empty() + !o.mean_of.empty();
  if (modes != 1)
    throw std::runtime_error(
        "trend needs exactly one of --series, --fields and --mean-of");

  MbbOptions mbb;
  mbb.b_replicates = o.b_replicates;
  mbb.alpha = o.alpha;
  mbb.seed = global.seed;
  mbb.detrend_first = o.detrend_first;
  mbb.block_length = o.block_length;

  Manifest manifest(o.out, "trend", global);

  if (!o.fields.empty()) {
    const GridField stack = read_dataset(o.fields);
    const TrendFieldResult result =
        trend_field(stack, mbb, o.min_years, global.threads);
    write_dataset(result.slope_per_decade, o.out + "/slope");
    manifest.add_output("slope");
    write_dataset(result.p_value, o.out + "/p_value");
    manifest.add_output("p_value");
    write_dataset(result.significant, o.out + "/significant");
    manifest.add_output("significant");
    const nlohmann::json summary = {{"skipped_pixels", result.skipped},
                                    {"alpha", o.alpha},
                                    {"min_years", o.min_years}};
    atomic_write_text(o.out + "/summary.json", summary.dump(2) + "\n");
    manifest.add_output("summary.json");
    manifest.finish();
    return;
  }

  mbb.keep_distribution = true;
  nlohmann::json report;
  if (!o.series.empty()) {
    const AnnualSeries series = read_series_csv(o.series);
    const TrendReport r = mbb_mk_test(series, mbb);
    report = {{"mode", "series"},
              {"ensemble", report_json(r)},
              {"formatted", format_trend_two_level(r, {})}};
  } else {
    if (o.surface.empty())
      throw std::runtime_error("trend --mean-of needs --surface");
    const SurfaceMask surface = read_surface_mask(o.surface);
    const RegionSelector sel =
        make_selector(o.hemisphere, o.surface_type, o.region);

    std::vector<AnnualSeries> per_product;
    for (const std::string& dir : o.mean_of)
      per_product.push_back(
          annual_mean_series(read_dataset(dir), surface, sel));
    for (const AnnualSeries& s : per_product)
      if (s.years != per_product.front().years)
        throw std::runtime_error("trend: products cover different years");

    AnnualSeries ensemble;
    ensemble.years = per_product.front().years;
    ensemble.values.assign(ensemble.years.size(), 0.0);
    for (const AnnualSeries& s : per_product)
      for (std::size_t k = 0; k < s.values.size(); ++k)
        ensemble.values[k] += s.values[k] / per_product.size();

    const TrendReport r = mbb_mk_test(ensemble, mbb);
    std::vector<double> product_slopes;
    for (const AnnualSeries& s : per_product)
      product_slopes.push_back(theil_sen(s));

    CsvTable means;
    means.header = {"year"};
    for (std::size_t m = 0; m < per_product.size(); ++m)
      means.header.push_back("product" + std::to_string(m + 1));
    means.header.push_back("ensemble");
    for (std::size_t k = 0; k < ensemble.years.size(); ++k) {
      std::vector<std::string> row = {std::to_string(ensemble.years[k])};
      for (const AnnualSeries& s : per_product)
        row.push_back(format_double(s.values[k]));
      row.push_back(format_double(ensemble.values[k]));
      means.rows.push_back(std::move(row));
    }
    write_csv(o.out + "/means.csv", means);
    manifest.add_output("means.csv");

    nlohmann::json slopes = nlohmann::json::array();
    for (const double s : product_slopes) slopes.push_back(s * 10.0);
    report = {{"mode", "mean-of"},
              {"selector", sel.describe()},
              {"ensemble", report_json(r)},
              {"product_slopes_per_decade", slopes},
              {"formatted", format_trend_two_level(r, product_slopes)}};
  }
  atomic_write_text(o.out + "/report.json", report.dump(2) + "\n");
  manifest.add_output("report.json");
  manifest.finish();
}

}  // namespace

void register_trend(CLI::App& app, GlobalOptions& global) {
  auto o = std::make_shared<TrendOpts>();
  CLI::App* cmd = app.add_subcommand(
      "trend", "Theil-Sen slope with bootstrap Mann-Kendall significance");
  cmd->fallthrough();
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--series", o->series, "Annual series CSV (year,value)");
  cmd->add_option("--fields", o->fields, "Annual dataset for per-pixel trends");
  cmd->add_option("--mean-of", o->mean_of,
                  "Dataset directories averaged into an ensemble series")
      ->delimiter(',');
  cmd->add_option("--surface", o->surface,
                  "Surface mask directory (with --mean-of)");
  const auto* hemi = cmd->add_option("--hemisphere", o->hemisphere,
                                     "global, north or south");
  const auto* surf = cmd->add_option("--surface-type", o->surface_type,
                                     "any, land or ocean");
  const auto* reg = cmd->add_option("--region", o->region,
                                    "Named region constraint");
  const auto* al = cmd->add_option("--alpha", o->alpha, "Significance level");
  const auto* br = cmd->add_option("--b-replicates", o->b_replicates,
                                   "Bootstrap replicates");
  const auto* bl = cmd->add_option("--block-length", o->block_length,
                                   "Block length (0 = from autocorrelation)");
  const auto* dt = cmd->add_flag("--detrend-first", o->detrend_first,
                                 "Detrend before the autocorrelation fit");
  const auto* my = cmd->add_option("--min-years", o->min_years,
                                   "Minimum usable years per pixel");

  cmd->callback([o, &global, hemi, surf, reg, al, br, bl, dt, my]() {
    global.load();
    const nlohmann::json sec = global.section("trend");
    cfg(hemi, sec, "hemisphere", o->hemisphere);
    cfg(surf, sec, "surface_type", o->surface_type);
    cfg(reg, sec, "region", o->region);
    cfg(al, sec, "alpha", o->alpha);
    cfg(br, sec, "b_replicates", o->b_replicates);
    cfg(bl, sec, "block_length", o->block_length);
    cfg(dt, sec, "detrend_first", o->detrend_first);
    cfg(my, sec, "min_years", o->min_years);
    run_trend(*o, global);
  });
}

}  // namespace snowtrend::cli
