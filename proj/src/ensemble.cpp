#include "snowtrend/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace snowtrend {

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  const double upper = v[m];
  if (v.size() % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + m);
  return 0.5 * (lower + upper);
}

}  // namespace

MadFilterResult mad_filter(std::span<const double> values, double k) {
  if (values.empty()) throw std::invalid_argument("mad_filter: empty input");
  if (!(k > 0.0)) throw std::invalid_argument("mad_filter: k must be positive");
  std::vector<double> work(values.begin(), values.end());
  const double med = median_inplace(work);
  for (double& v : work) v = std::fabs(v - med);
  const double mad = median_inplace(work);
  const double cut = k * kMadScale * mad;

  MadFilterResult result;
  result.kept.reserve(values.size());
  for (const double v : values)
    if (std::fabs(v - med) <= cut) result.kept.push_back(v);
  result.removed_fraction =
      1.0 - static_cast<double>(result.kept.size()) /
                static_cast<double>(values.size());
  return result;
}

ErrorModel ml_weights(std::span<const double> sigmas) {
  if (sigmas.empty()) throw std::invalid_argument("ml_weights: no products");
  ErrorModel model;
  model.sigmas.assign(sigmas.begin(), sigmas.end());
  double inv_sum = 0.0;
  for (const double s : sigmas) {
    if (!(s > 0.0))
      throw std::invalid_argument("ml_weights: sigma must be positive, got " +
                                  std::to_string(s));
    inv_sum += 1.0 / (s * s);
  }
  model.weights.reserve(sigmas.size());
  for (const double s : sigmas) model.weights.push_back(1.0 / (s * s) / inv_sum);
  model.theoretical_sigma = 1.0 / std::sqrt(inv_sum);
  return model;
}

GaugeMatchupSet build_matchups(std::span<const GaugeRecord> gauges,
                               const std::string& variable,
                               std::span<const GridField> products) {
  if (products.empty())
    throw std::invalid_argument("build_matchups: no products");
  for (const GridField& p : products) validate_field(p);

  // Station -> per-product pixel, date -> per-product time index.
  std::vector<std::unordered_map<std::int64_t, std::size_t>> time_index(
      products.size());
  for (std::size_t m = 0; m < products.size(); ++m)
    for (std::size_t t = 0; t < products[m].times.size(); ++t)
      time_index[m][products[m].times[t].serial()] = t;

  std::unordered_map<std::string, std::vector<std::size_t>> station_pixel;

  GaugeMatchupSet set;
  set.n_products = products.size();
  for (const GaugeRecord& g : gauges) {
    if (g.variable != variable || !std::isfinite(g.value)) continue;
    auto it = station_pixel.find(g.station_id);
    if (it == station_pixel.end()) {
      std::vector<std::size_t> pixels(products.size());
      for (std::size_t m = 0; m < products.size(); ++m)
        pixels[m] = nearest_pixel(products[m].grid, g.lat, g.lon);
      it = station_pixel.emplace(g.station_id, std::move(pixels)).first;
    }

    Matchup row;
    row.station_id = g.station_id;
    row.date = g.date;
    row.gauge = g.value;
    row.products.assign(products.size(),
                        std::numeric_limits<double>::quiet_NaN());
    bool any = false;
    for (std::size_t m = 0; m < products.size(); ++m) {
      const auto t = time_index[m].find(g.date.serial());
      if (t == time_index[m].end()) continue;
      const float v =
          products[m].values[t->second * products[m].grid.size() +
                             it->second[m]];
      if (std::isnan(v)) continue;
      row.products[m] = v;
      any = true;
    }
    if (any) set.rows.push_back(std::move(row));
  }
  return set;
}

SigmaEstimate estimate_sigma(const GaugeMatchupSet& matchups,
                             std::size_t product, bool use_mad, double mad_k) {
  if (product >= matchups.n_products)
    throw std::invalid_argument("estimate_sigma: product index out of range");

  std::vector<double> residuals;
  residuals.reserve(matchups.rows.size());
  for (const Matchup& row : matchups.rows) {
    const double v = row.products[product];
    if (std::isfinite(v)) residuals.push_back(v - row.gauge);
  }
  if (residuals.size() < 2)
    throw std::runtime_error("estimate_sigma: fewer than two matchups");

  SigmaEstimate est;
  double mean = 0.0;
  for (const double r : residuals) mean += r;
  est.bias = mean / static_cast<double>(residuals.size());

  std::vector<double> kept;
  if (use_mad) {
    MadFilterResult f = mad_filter(residuals, mad_k);
    est.removed_fraction = f.removed_fraction;
    kept = std::move(f.kept);
  } else {
    kept = std::move(residuals);
  }
  if (kept.size() < 2)
    throw std::runtime_error("estimate_sigma: filter left fewer than two");

  double m = 0.0;
  for (const double r : kept) m += r;
  m /= static_cast<double>(kept.size());
  double ss = 0.0;
  for (const double r : kept) ss += (r - m) * (r - m);
  est.sigma = std::sqrt(ss / static_cast<double>(kept.size() - 1));
  est.n_used = kept.size();
  est.degenerate = est.sigma == 0.0;
  return est;
}

GridField ensemble_mean(std::span<const GridField> fields,
                        const ErrorModel& model) {
  if (fields.empty()) throw std::invalid_argument("ensemble_mean: no fields");
  if (model.weights.size() != fields.size())
    throw std::invalid_argument("ensemble_mean: weight/field count mismatch");
  for (const GridField& f : fields) {
    validate_field(f);
    if (f.grid != fields[0].grid)
      throw std::invalid_argument("ensemble_mean: grids differ");
    if (f.times != fields[0].times)
      throw std::invalid_argument("ensemble_mean: time axes differ");
    if (f.units != fields[0].units)
      throw std::invalid_argument("ensemble_mean: units differ ('" + f.units +
                                  "' vs '" + fields[0].units + "')");
  }

  GridField out = make_field(fields[0].grid, fields[0].times, fields[0].units,
                             fields[0].variable);
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    double acc = 0.0;
    double wsum = 0.0;
    for (std::size_t m = 0; m < fields.size(); ++m) {
      const float v = fields[m].values[p];
      if (std::isnan(v)) continue;
      acc += model.weights[m] * v;
      wsum += model.weights[m];
    }
    if (wsum > 0.0) out.values[p] = static_cast<float>(acc / wsum);
  }
  return out;
}

}  // namespace snowtrend
