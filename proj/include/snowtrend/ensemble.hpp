#pragma once

#include <span>
#include <string>
#include <vector>

#include "snowtrend/field.hpp"
#include "snowtrend/gauges.hpp"

namespace snowtrend {

constexpr double kMadScale = 1.4826;  // MAD -> sigma for a normal population

struct MadFilterResult {
  std::vector<double> kept;
  double removed_fraction = 0.0;
};

// Keeps values with |x - median| <= k * 1.4826 * MAD. A zero MAD therefore
// keeps exactly the values equal to the median.
MadFilterResult mad_filter(std::span<const double> values, double k);

// Per-product error model: inverse-variance weights w_m = s_m^-2 / sum s^-2
// and the implied ensemble error (sum s^-2)^(-1/2).
struct ErrorModel {
  std::vector<double> sigmas;
  std::vector<double> weights;
  double theoretical_sigma = 0.0;
};

ErrorModel ml_weights(std::span<const double> sigmas);

// A station-day paired with every product's value at the station's nearest
// cell center (NaN where a product has no data).
struct Matchup {
  std::string station_id;
  Date date;
  double gauge = 0.0;
  std::vector<double> products;
};

struct GaugeMatchupSet {
  std::size_t n_products = 0;
  std::vector<Matchup> rows;
};

// Pairs gauge records of `variable` against each product at its native grid.
// Rows keep a finite gauge value and at least one finite product value.
GaugeMatchupSet build_matchups(std::span<const GaugeRecord> gauges,
                               const std::string& variable,
                               std::span<const GridField> products);

struct SigmaEstimate {
  double sigma = 0.0;
  double bias = 0.0;               // mean residual before filtering
  std::size_t n_used = 0;
  double removed_fraction = 0.0;   // dropped by the MAD filter
  bool degenerate = false;         // zero spread in the residuals
};

// Residual spread (sample standard deviation, n-1) of product - gauge,
// optionally MAD-filtered first. Needs at least two residuals.
SigmaEstimate estimate_sigma(const GaugeMatchupSet& matchups,
                             std::size_t product, bool use_mad = true,
                             double mad_k = 3.0);

// Weighted mean across products on a shared grid/time axis. Weights
// renormalize over the products present at each pixel; all-missing pixels
// stay NaN.
GridField ensemble_mean(std::span<const GridField> fields,
                        const ErrorModel& model);

}  // namespace snowtrend
