#include "snowtrend/trend.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "snowtrend/parallel.hpp"

namespace snowtrend {

namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

int sgn(double d) { return (d > 0.0) - (d < 0.0); }

double mean_of(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m += x;
  return m / static_cast<double>(v.size());
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void validate_series(const AnnualSeries& series) {
  if (series.years.size() != series.values.size())
    throw std::invalid_argument("series year/value size mismatch");
  if (series.years.empty()) throw std::invalid_argument("empty series");
  for (std::size_t i = 1; i < series.years.size(); ++i)
    if (series.years[i] <= series.years[i - 1])
      throw std::invalid_argument("series years not strictly increasing");
  for (const double v : series.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("series values must be finite");
}

double theil_sen(const AnnualSeries& series) {
  validate_series(series);
  const std::size_t n = series.years.size();
  if (n < 2) throw std::invalid_argument("theil_sen: need at least two points");

  std::vector<double> slopes;
  slopes.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      slopes.push_back((series.values[j] - series.values[i]) /
                       static_cast<double>(series.years[j] - series.years[i]));

  const std::size_t m = slopes.size() / 2;
  std::nth_element(slopes.begin(), slopes.begin() + m, slopes.end());
  const double upper = slopes[m];
  if (slopes.size() % 2) return upper;
  const double lower = *std::max_element(slopes.begin(), slopes.begin() + m);
  return 0.5 * (lower + upper);
}

long long mk_statistic(std::span<const double> values) {
  long long s = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      s += sgn(values[j] - values[i]);
  return s;
}

double mk_variance(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double var = n * (n - 1.0) * (2.0 * n + 5.0);

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    if (t > 1.0) var -= t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  return var / 18.0;
}

double mk_z(long long s, double var_s) {
  if (s == 0) return 0.0;
  if (!(var_s > 0.0))
    throw std::domain_error("mk_z: zero variance with nonzero S");
  const double shifted = s > 0 ? static_cast<double>(s) - 1.0
                               : static_cast<double>(s) + 1.0;
  return shifted / std::sqrt(var_s);
}

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("normal_quantile: p outside (0, 1)");

  // Acklam's rational approximation, then one Halley step on the CDF.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

int autocorr_length(std::span<const double> values, double alpha) {
  const std::size_t n = values.size();
  if (n < 3) return 0;
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("autocorr_length: alpha outside (0, 1)");

  const double mean = mean_of(values);
  double den = 0.0;
  for (const double v : values) den += (v - mean) * (v - mean);
  if (den == 0.0) return 0;  // constant series carries no autocorrelation

  const double band =
      normal_quantile(1.0 - alpha / 2.0) / std::sqrt(static_cast<double>(n));
  int r = 0;
  for (std::size_t k = 1; k + 2 <= n; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t)
      num += (values[t] - mean) * (values[t + k] - mean);
    if (std::fabs(num / den) > band)
      r = static_cast<int>(k);
    else
      break;
  }
  return r;
}

double empirical_quantile(std::span<const long long> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("empirical_quantile: empty");
  if (!(p >= 0.0) || !(p <= 1.0))
    throw std::invalid_argument("empirical_quantile: p outside [0, 1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= sorted.size())
    return static_cast<double>(sorted[lo]);
  return static_cast<double>(sorted[lo]) +
         frac * static_cast<double>(sorted[lo + 1] - sorted[lo]);
}

std::vector<long long> mbb_null_distribution(std::span<const double> values,
                                             int block_length,
                                             int b_replicates,
                                             std::uint64_t seed) {
  const std::size_t n = values.size();
  if (block_length < 1 || static_cast<std::size_t>(block_length) > n)
    throw std::invalid_argument("mbb: block length outside [1, n]");
  if (b_replicates < 1)
    throw std::invalid_argument("mbb: need at least one replicate");

  const std::size_t l = static_cast<std::size_t>(block_length);
  const std::size_t n_blocks = n - l + 1;
  std::vector<long long> dist(b_replicates);
  std::vector<double> replicate(n);
  for (int b = 0; b < b_replicates; ++b) {
    std::mt19937_64 engine(seed ^ static_cast<std::uint64_t>(b));
    std::size_t pos = 0;
    while (pos < n) {
      const std::size_t start = engine() % n_blocks;
      const std::size_t take = std::min(l, n - pos);
      std::copy_n(values.begin() + start, take, replicate.begin() + pos);
      pos += take;
    }
    dist[b] = mk_statistic(replicate);
  }
  std::sort(dist.begin(), dist.end());
  return dist;
}

namespace {

bool outside_null(long long s, std::span<const long long> sorted,
                  double alpha) {
  const double qlo = empirical_quantile(sorted, alpha / 2.0);
  const double qhi = empirical_quantile(sorted, 1.0 - alpha / 2.0);
  return static_cast<double>(s) > qhi || static_cast<double>(s) < qlo;
}

}  // namespace

TrendReport mbb_mk_test(const AnnualSeries& series, const MbbOptions& opt) {
  validate_series(series);
  const std::size_t n = series.values.size();
  if (n < 3) throw std::invalid_argument("mbb_mk_test: need n >= 3");
  if (opt.b_replicates < 100)
    throw std::invalid_argument("mbb_mk_test: need B >= 100");
  if (!(opt.alpha > 0.0) || !(opt.alpha < 0.5))
    throw std::invalid_argument("mbb_mk_test: alpha outside (0, 0.5)");

  TrendReport report;
  report.alpha = opt.alpha;
  report.b_replicates = opt.b_replicates;
  report.seed = opt.seed;
  report.n_years = n;
  report.slope = theil_sen(series);

  if (opt.block_length > 0) {
    report.block_length = opt.block_length;
    report.autocorr_r = opt.block_length - 1;
  } else {
    std::vector<double> base = series.values;
    if (opt.detrend_first)
      for (std::size_t i = 0; i < n; ++i)
        base[i] -= report.slope * static_cast<double>(series.years[i]);
    report.autocorr_r = autocorr_length(base, opt.alpha);
    report.block_length = report.autocorr_r + 1;
  }
  if (n < 2 * static_cast<std::size_t>(report.block_length))
    throw std::runtime_error("mbb_mk_test: series too short for block length " +
                             std::to_string(report.block_length));

  report.mk_s = mk_statistic(series.values);
  report.mk_var = mk_variance(series.values);
  report.z = mk_z(report.mk_s, report.mk_var);

  std::vector<long long> dist = mbb_null_distribution(
      series.values, report.block_length, opt.b_replicates, opt.seed);
  report.significant = outside_null(report.mk_s, dist, opt.alpha);

  std::size_t ge = 0;
  std::size_t le = 0;
  for (const long long s : dist) {
    if (s >= report.mk_s) ++ge;
    if (s <= report.mk_s) ++le;
  }
  report.p_bootstrap =
      std::min(1.0, 2.0 * static_cast<double>(std::min(ge, le)) /
                        static_cast<double>(dist.size()));
  if (opt.keep_distribution) report.s_star = std::move(dist);
  return report;
}

bool significant_at(const TrendReport& report, double alpha) {
  if (report.s_star.empty())
    throw std::logic_error("significant_at: null distribution not kept");
  return outside_null(report.mk_s, report.s_star, alpha);
}

std::string format_trend(double ensemble_slope, bool significant, double alpha,
                         std::span<const double> product_slopes) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%.2f", ensemble_slope * 10.0);
  out = buf;
  if (significant) {
    std::snprintf(buf, sizeof(buf), "_{%g}", alpha);
    out += buf;
  }
  if (!product_slopes.empty()) {
    const auto [lo, hi] =
        std::minmax_element(product_slopes.begin(), product_slopes.end());
    std::snprintf(buf, sizeof(buf), " (%.2f–%.2f)", *lo * 10.0,
                  *hi * 10.0);
    out += buf;
  }
  return out;
}

std::string format_trend_two_level(const TrendReport& ensemble,
                                   std::span<const double> product_slopes) {
  bool significant = false;
  double level = 0.0;
  for (const double alpha : {0.01, 0.05}) {
    if (significant_at(ensemble, alpha)) {
      significant = true;
      level = alpha;
      break;
    }
  }
  return format_trend(ensemble.slope, significant, level, product_slopes);
}

TrendFieldResult trend_field(const GridField& annual_stack,
                             const MbbOptions& opt, int min_years,
                             int threads) {
  validate_field(annual_stack);
  const auto step = classify_time_step(annual_stack.times);
  if (step != TimeStep::annual && step != TimeStep::single)
    throw std::invalid_argument("trend_field: annual stack required");

  const std::vector<Date> stamp{annual_stack.times.front()};
  TrendFieldResult result{
      make_field(annual_stack.grid, stamp, annual_stack.units + " per decade",
                 annual_stack.variable + "_trend"),
      make_field(annual_stack.grid, stamp, "probability",
                 annual_stack.variable + "_trend_p"),
      make_field(annual_stack.grid, stamp, "flag",
                 annual_stack.variable + "_trend_sig"),
      0};

  const std::size_t pixels = annual_stack.grid.size();
  std::atomic<std::size_t> skipped{0};
  parallel_for(pixels, threads, [&](std::size_t begin, std::size_t end) {
    AnnualSeries series;
    std::size_t local_skipped = 0;
    for (std::size_t p = begin; p < end; ++p) {
      series.years.clear();
      series.values.clear();
      for (std::size_t t = 0; t < annual_stack.ntimes(); ++t) {
        const float v = annual_stack.values[t * pixels + p];
        if (std::isnan(v)) continue;
        series.years.push_back(annual_stack.times[t].year());
        series.values.push_back(v);
      }
      if (series.years.size() <
          static_cast<std::size_t>(std::max(min_years, 3))) {
        ++local_skipped;
        continue;
      }
      MbbOptions pixel_opt = opt;
      pixel_opt.seed = splitmix64(opt.seed ^ (static_cast<std::uint64_t>(p) *
                                              0x9e3779b97f4a7c15ULL));
      pixel_opt.keep_distribution = false;
      try {
        const TrendReport r = mbb_mk_test(series, pixel_opt);
        result.slope_per_decade.values[p] = static_cast<float>(r.slope * 10.0);
        result.p_value.values[p] = static_cast<float>(r.p_bootstrap);
        result.significant.values[p] = r.significant ? 1.0f : 0.0f;
      } catch (const std::runtime_error&) {
        ++local_skipped;  // usable years too few for the block length
      }
    }
    skipped += local_skipped;
  });
  result.skipped = skipped;
  return result;
}

AgreementResult trend_agreement(std::span<const TrendFieldResult> products,
                                const TrendFieldResult& ensemble) {
  if (products.empty())
    throw std::invalid_argument("trend_agreement: no products");
  for (const TrendFieldResult& p : products)
    if (p.slope_per_decade.grid != ensemble.slope_per_decade.grid)
      throw std::invalid_argument("trend_agreement: grids differ");

  AgreementResult result{
      make_field(ensemble.slope_per_decade.grid,
                 ensemble.slope_per_decade.times, "count", "trend_agreement"),
      make_field(ensemble.slope_per_decade.grid,
                 ensemble.slope_per_decade.times,
                 ensemble.slope_per_decade.units,
                 ensemble.slope_per_decade.variable + "_agreed")};

  const std::size_t pixels = ensemble.slope_per_decade.grid.size();
  for (std::size_t p = 0; p < pixels; ++p) {
    int positive = 0;
    int negative = 0;
    for (const TrendFieldResult& prod : products) {
      if (!(prod.significant.values[p] > 0.5f)) continue;
      const float slope = prod.slope_per_decade.values[p];
      if (slope > 0.0f) ++positive;
      if (slope < 0.0f) ++negative;
    }
    const int agreement = std::max(positive, negative);
    result.agreement.values[p] = static_cast<float>(agreement);
    result.ensemble_slope_per_decade.values[p] =
        agreement >= 2 ? ensemble.slope_per_decade.values[p] : kNaN;
  }
  return result;
}

}  // namespace snowtrend
