#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "snowtrend/dataset.hpp"
#include "snowtrend/ensemble.hpp"
#include "snowtrend/gauges.hpp"

namespace snowtrend::cli {

namespace {

struct FuseOpts {
  std::string out;
  std::vector<std::string> products;
  std::string gauges;
  std::string variable = "wet_bulb";
  std::vector<double> sigmas;
  bool no_mad = false;
  double mad_k = 3.0;
  std::string target = "finest";
};

std::size_t finest_grid(const std::vector<GridField>& products) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < products.size(); ++m) {
    const GeoGrid& g = products[m].grid;
    const GeoGrid& b = products[best].grid;
    if (g.dlat * g.dlon < b.dlat * b.dlon) best = m;
  }
  return best;
}

void run_fuse(const FuseOpts& o, const GlobalOptions& global) {
  std::vector<GridField> products;
  products.reserve(o.products.size());
  for (const std::string& dir : o.products)
    products.push_back(read_dataset(dir));
  if (products.empty()) throw std::runtime_error("fuse needs --products");

  nlohmann::json product_models = nlohmann::json::array();
  std::vector<double> sigmas = o.sigmas;
  if (sigmas.empty()) {
    if (o.gauges.empty())
      throw std::runtime_error("fuse needs --gauges unless --sigmas is given");
    const auto records = read_gauge_csv(o.gauges);
    const GaugeMatchupSet matchups =
        build_matchups(records, o.variable, products);
    for (std::size_t m = 0; m < products.size(); ++m) {
      const SigmaEstimate est =
          estimate_sigma(matchups, m, !o.no_mad, o.mad_k);
      sigmas.push_back(est.sigma);
      product_models.push_back({{"sigma", est.sigma},
                                {"bias", est.bias},
                                {"n_used", est.n_used},
                                {"removed_fraction", est.removed_fraction},
                                {"degenerate", est.degenerate}});
    }
  } else {
    if (sigmas.size() != products.size())
      throw std::runtime_error("fuse: --sigmas count differs from products");
    for (const double s : sigmas) product_models.push_back({{"sigma", s}});
  }

  const ErrorModel model = ml_weights(sigmas);
  for (std::size_t m = 0; m < products.size(); ++m)
    product_models[m]["weight"] = model.weights[m];

  std::size_t target = 0;
  if (o.target == "finest") {
    target = finest_grid(products);
  } else {
    const int k = parse_int(o.target);
    if (k < 1 || static_cast<std::size_t>(k) > products.size())
      throw std::runtime_error("fuse: --target product number out of range");
    target = static_cast<std::size_t>(k - 1);
  }
  const GeoGrid dst = products[target].grid;
  for (GridField& f : products)
    if (!(f.grid == dst)) f = regrid_nearest(f, dst);

  const GridField fused = ensemble_mean(products, model);

  Manifest manifest(o.out, "fuse", global);
  write_dataset(fused, o.out + "/fused");
  manifest.add_output("fused");
  const nlohmann::json error_model = {
      {"variable", o.variable},
      {"estimated", o.sigmas.empty()},
      {"mad", {{"enabled", !o.no_mad}, {"k", o.mad_k}}},
      {"products", product_models},
      {"theoretical_sigma", model.theoretical_sigma}};
  atomic_write_text(o.out + "/error_model.json", error_model.dump(2) + "\n");
  manifest.add_output("error_model.json");
  manifest.finish();
}

}  // namespace

void register_fuse(CLI::App& app, GlobalOptions& global) {
  auto o = std::make_shared<FuseOpts>();
  CLI::App* cmd = app.add_subcommand(
      "fuse", "Inverse-variance ensemble mean of gridded products");
  cmd->fallthrough();
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--products", o->products, "Product dataset directories")
      ->required()
      ->delimiter(',');
  cmd->add_option("--gauges", o->gauges, "Gauge CSV for error estimation");
  const auto* var = cmd->add_option("--variable", o->variable,
                                    "Gauge variable to match");
  const auto* sig =
      cmd->add_option("--sigmas", o->sigmas,
                      "Product error sigmas, bypassing gauge estimation")
          ->delimiter(',');
  const auto* nm = cmd->add_flag("--no-mad", o->no_mad,
                                 "Skip the MAD residual filter");
  const auto* mk = cmd->add_option("--mad-k", o->mad_k,
                                   "MAD filter width in robust sigmas");
  const auto* tg = cmd->add_option(
      "--target", o->target,
      "Target grid: finest or a 1-based product number");

  cmd->callback([o, &global, var, sig, nm, mk, tg]() {
    global.load();
    const nlohmann::json sec = global.section("fuse");
    cfg(var, sec, "variable", o->variable);
    cfg(sig, sec, "sigmas", o->sigmas);
    cfg(nm, sec, "no_mad", o->no_mad);
    cfg(mk, sec, "mad_k", o->mad_k);
    cfg(tg, sec, "target", o->target);
    run_fuse(*o, global);
  });
}

}  // namespace snowtrend::cli
