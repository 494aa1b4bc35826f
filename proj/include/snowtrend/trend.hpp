#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snowtrend/field.hpp"

namespace snowtrend {

struct AnnualSeries {
  std::vector<int> years;      // strictly increasing
  std::vector<double> values;  // finite
};

void validate_series(const AnnualSeries& series);

// Median of all pairwise slopes (mean of the central two for an even count),
// in value units per year.
double theil_sen(const AnnualSeries& series);

// Mann-Kendall S = sum_{i<j} sgn(x_j - x_i).
long long mk_statistic(std::span<const double> values);

// Var(S) with the tie correction:
// [n(n-1)(2n+5) - sum t(t-1)(2t+5)] / 18 over tied groups.
double mk_variance(std::span<const double> values);

// Continuity-corrected normal score: (S -+ 1) / sqrt(Var), 0 when S = 0.
double mk_z(long long s, double var_s);

// Inverse standard normal CDF, p in (0, 1).
double normal_quantile(double p);

// Largest r such that the lag-1..r sample autocorrelations all exceed the
// two-sided |r_k| > z_{1-alpha/2}/sqrt(n) band; 0 when lag 1 already fails.
int autocorr_length(std::span<const double> values, double alpha);

// Linear-interpolated order statistic of a sorted sample at probability p.
double empirical_quantile(std::span<const long long> sorted, double p);

// Null distribution of S under the moving-block bootstrap: B replicates,
// each pasted from ceil(n/l) blocks of length l drawn uniformly from the
// n-l+1 overlapping blocks, truncated to length n. Replicate b uses an
// mt19937_64 seeded with seed ^ b. Returned sorted.
std::vector<long long> mbb_null_distribution(std::span<const double> values,
                                             int block_length,
                                             int b_replicates,
                                             std::uint64_t seed);

struct MbbOptions {
  int b_replicates = 3000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool detrend_first = false;  // estimate autocorrelation on detrended values
  int block_length = 0;        // 0 = autocorrelation length + 1
  bool keep_distribution = false;
};

struct TrendReport {
  double slope = 0.0;  // units per year
  long long mk_s = 0;
  double mk_var = 0.0;
  double z = 0.0;
  double p_bootstrap = 1.0;
  bool significant = false;
  double alpha = 0.05;
  int autocorr_r = 0;
  int block_length = 1;
  int b_replicates = 0;
  std::uint64_t seed = 0;
  std::size_t n_years = 0;
  std::vector<long long> s_star;  // sorted null sample, kept on request
};

// Theil-Sen slope plus block-bootstrap Mann-Kendall significance: the trend
// is significant when S falls strictly outside the [alpha/2, 1 - alpha/2]
// quantiles of the bootstrap null. Requires n >= 2 * block_length.
TrendReport mbb_mk_test(const AnnualSeries& series, const MbbOptions& opt = {});

// Re-evaluates significance at another alpha from the stored null sample.
bool significant_at(const TrendReport& report, double alpha);

// "b_a (b_min-b_max)": ensemble slope per decade with the significance level
// as a subscript (omitted when insignificant) and the per-product range in
// parentheses. Slopes are per-year inputs, printed x10 with two decimals.
std::string format_trend(double ensemble_slope, bool significant, double alpha,
                         std::span<const double> product_slopes);

// Subscript picks the smallest significant level of {0.01, 0.05}; requires a
// report with the null distribution kept.
std::string format_trend_two_level(const TrendReport& ensemble,
                                   std::span<const double> product_slopes);

struct TrendFieldResult {
  GridField slope_per_decade;
  GridField p_value;
  GridField significant;        // 1 / 0 / NaN
  std::size_t skipped = 0;      // pixels with too short a usable series
};

// Pixel-wise Theil-Sen + MBB over a stack of annual layers. Pixels whose
// finite-year count is below min_years (or too short for the chosen block
// length) come out NaN. Per-pixel seeds derive from opt.seed and the pixel
// index, so results do not depend on threading.
TrendFieldResult trend_field(const GridField& annual_stack,
                             const MbbOptions& opt = {}, int min_years = 10,
                             int threads = 1);

struct AgreementResult {
  GridField agreement;              // products agreeing in significant sign
  GridField ensemble_slope_per_decade;  // masked to agreement >= 2
};

AgreementResult trend_agreement(std::span<const TrendFieldResult> products,
                                const TrendFieldResult& ensemble);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace snowtrend
