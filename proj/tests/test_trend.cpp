#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "snowtrend/rng.hpp"
#include "snowtrend/trend.hpp"

using namespace snowtrend;

namespace {

// Independent oracle: sort every pairwise slope and take the textbook median.
double oracle_theil_sen(const AnnualSeries& s) {
  std::vector<double> slopes;
  for (std::size_t i = 0; i < s.values.size(); ++i)
    for (std::size_t j = i + 1; j < s.values.size(); ++j)
      slopes.push_back((s.values[j] - s.values[i]) /
                       (s.years[j] - s.years[i]));
  std::sort(slopes.begin(), slopes.end());
  const std::size_t n = slopes.size();
  return n % 2 ? slopes[n / 2]
               : 0.5 * (slopes[n / 2 - 1] + slopes[n / 2]);
}

long long oracle_mk_s(const std::vector<double>& x) {
  long long s = 0;
  for (std::size_t j = 1; j < x.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      if (x[j] > x[i]) ++s;
      if (x[j] < x[i]) --s;
    }
  return s;
}

AnnualSeries line_series(int n, double intercept, double slope,
                         double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  AnnualSeries s;
  for (int i = 0; i < n; ++i) {
    s.years.push_back(1980 + i);
    s.values.push_back(intercept + slope * i + noise_sd * rng.normal());
  }
  return s;
}

}  // namespace

TEST_CASE("Theil-Sen recovers an exact line and matches the sorted median") {
  AnnualSeries line;
  for (int y = 2000; y < 2013; ++y) {
    line.years.push_back(y);
    line.values.push_back(3.0 + 0.5 * (y - 2000));
  }
  CHECK(theil_sen(line) == doctest::Approx(0.5).epsilon(1e-15));

  // one wild outlier barely moves the estimate
  line.values[6] += 1000.0;
  CHECK(theil_sen(line) == doctest::Approx(oracle_theil_sen(line)));
  CHECK(std::fabs(theil_sen(line) - 0.5) < 0.2);

  Rng rng(3111);
  for (int trial = 0; trial < 200; ++trial) {
    AnnualSeries s;
    const int n = 2 + static_cast<int>(rng.below(11));
    int year = 1950 + static_cast<int>(rng.below(40));
    for (int i = 0; i < n; ++i) {
      year += 1 + static_cast<int>(rng.below(3));  // gappy years
      s.years.push_back(year);
      // lattice values force duplicate slopes and ties
      s.values.push_back(static_cast<double>(rng.below(7)) * 0.5);
    }
    CHECK(theil_sen(s) ==
          doctest::Approx(oracle_theil_sen(s)).epsilon(1e-12));
  }
}

TEST_CASE("Theil-Sen validates its input") {
  CHECK_THROWS_AS(theil_sen({{2000}, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(theil_sen({{2000, 2000}, {1.0, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(theil_sen({{2000, 2001}, {1.0, 2.0, 3.0}}),
                  std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(theil_sen({{2000, 2001}, {1.0, nan}}),
                  std::invalid_argument);
  CHECK(theil_sen({{2000, 2004}, {1.0, 3.0}}) == doctest::Approx(0.5));
}

TEST_CASE("Mann-Kendall statistic: frozen cases and oracle sweep") {
  std::vector<double> up;
  for (int i = 0; i < 10; ++i) up.push_back(i);
  CHECK(mk_statistic(up) == 45);
  std::vector<double> down(up.rbegin(), up.rend());
  CHECK(mk_statistic(down) == -45);
  CHECK(mk_statistic(std::vector<double>{3, 1, 4, 1, 5}) == 3);
  CHECK(mk_statistic(std::vector<double>{7, 7, 7}) == 0);
  CHECK(mk_statistic(std::vector<double>{}) == 0);

  Rng rng(515);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x;
    const std::size_t n = 2 + rng.below(20);
    for (std::size_t i = 0; i < n; ++i)
      x.push_back(static_cast<double>(rng.below(6)));
    CHECK(mk_statistic(x) == oracle_mk_s(x));
  }
}

TEST_CASE("Mann-Kendall variance: tie correction against frozen algebra") {
  // n = 10, no ties: 10 * 9 * 25 / 18
  std::vector<double> up;
  for (int i = 0; i < 10; ++i) up.push_back(i);
  CHECK(mk_variance(up) == 125.0);

  // n = 4 with one tied pair: (4*3*13 - 2*1*9) / 18 = 23/3
  CHECK(mk_variance(std::vector<double>{1, 2, 2, 3}) ==
        doctest::Approx(7.666666666666667).epsilon(1e-15));

  // everything tied: variance collapses to zero
  CHECK(mk_variance(std::vector<double>{5, 5, 5, 5, 5}) == 0.0);

  // two tie groups, n = 6: (6*5*17 - [2*1*9 + 3*2*11]) / 18 = 426/18
  CHECK(mk_variance(std::vector<double>{1, 1, 2, 3, 3, 3}) ==
        doctest::Approx(426.0 / 18.0).epsilon(1e-15));
}

TEST_CASE("Mann-Kendall Z applies the continuity correction") {
  CHECK(mk_z(45, 125.0) ==
        doctest::Approx(3.9354796403996297).epsilon(1e-15));
  CHECK(mk_z(-10, 125.0) ==
        doctest::Approx(-0.8049844718999243).epsilon(1e-15));
  CHECK(mk_z(0, 125.0) == 0.0);
  CHECK(mk_z(0, 0.0) == 0.0);
  CHECK_THROWS_AS(mk_z(5, 0.0), std::domain_error);
}

TEST_CASE("normal quantile: frozen values, symmetry, and CDF round trip") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) ==
        doctest::Approx(1.9599639845400543).epsilon(1e-12));
  CHECK(normal_quantile(0.995) ==
        doctest::Approx(2.575829303548901).epsilon(1e-12));
  CHECK(normal_quantile(0.001) ==
        doctest::Approx(-3.0902323061678136).epsilon(1e-12));
  CHECK(normal_quantile(0.84134474606854293) ==
        doctest::Approx(1.0).epsilon(1e-12));

  for (double p = 0.0005; p < 0.5; p += 0.0101) {
    CHECK(normal_quantile(p) ==
          doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-10));
    const double x = normal_quantile(p);
    const double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
    CHECK(back == doctest::Approx(p).epsilon(1e-11));
  }

  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("autocorrelation length separates white noise from AR(1)") {
  Rng rng(2025);
  std::vector<double> white;
  for (int i = 0; i < 200; ++i) white.push_back(rng.normal());
  CHECK(autocorr_length(white, 0.05) == 0);

  std::vector<double> ar;
  double prev = 0.0;
  Rng rng2(77);
  for (int i = 0; i < 400; ++i) {
    prev = 0.85 * prev + rng2.normal();
    ar.push_back(prev);
  }
  CHECK(autocorr_length(ar, 0.05) >= 1);

  CHECK(autocorr_length(std::vector<double>{4, 4, 4, 4, 4, 4}, 0.05) == 0);
  CHECK(autocorr_length(std::vector<double>{1, 2}, 0.05) == 0);
  CHECK_THROWS_AS(autocorr_length(white, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(autocorr_length(white, 1.0), std::invalid_argument);
}

TEST_CASE("empirical quantile interpolates order statistics") {
  const std::vector<long long> two{0, 10};
  CHECK(empirical_quantile(two, 0.5) == 5.0);
  CHECK(empirical_quantile(two, 0.25) == 2.5);
  CHECK(empirical_quantile(two, 0.0) == 0.0);
  CHECK(empirical_quantile(two, 1.0) == 10.0);

  const std::vector<long long> five{1, 2, 3, 4, 5};
  CHECK(empirical_quantile(five, 0.5) == 3.0);
  CHECK(empirical_quantile(five, 0.1) == doctest::Approx(1.4));

  const std::vector<long long> one{42};
  CHECK(empirical_quantile(one, 0.0) == 42.0);
  CHECK(empirical_quantile(one, 1.0) == 42.0);

  CHECK_THROWS_AS(empirical_quantile(std::vector<long long>{}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(empirical_quantile(five, 1.5), std::invalid_argument);
}

TEST_CASE("block bootstrap degenerates correctly at the extremes") {
  std::vector<double> x{0.3, -1.2, 2.2, 0.9, -0.4, 1.7, 0.0, -2.1};
  // l = n: the only block is the series itself, so S* is constant at S
  const long long s = mk_statistic(x);
  for (const long long v :
       mbb_null_distribution(x, static_cast<int>(x.size()), 64, 99))
    CHECK(v == s);

  CHECK_THROWS_AS(mbb_null_distribution(x, 0, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(mbb_null_distribution(x, 9, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(mbb_null_distribution(x, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("block bootstrap replicates the documented resampling recipe") {
  const std::vector<double> x{0.3, -1.2, 2.2, 0.9, -0.4, 1.7, 0.0, -2.1};
  const int l = 3;
  const int B = 50;
  const std::uint64_t seed = 1234;

  std::vector<long long> oracle;
  const std::size_t n = x.size();
  const std::size_t n_blocks = n - l + 1;
  for (int b = 0; b < B; ++b) {
    std::mt19937_64 engine(seed ^ static_cast<std::uint64_t>(b));
    std::vector<double> rep;
    while (rep.size() < n) {
      const std::size_t start = engine() % n_blocks;
      for (int i = 0; i < l && rep.size() < n; ++i)
        rep.push_back(x[start + i]);
    }
    oracle.push_back(oracle_mk_s(rep));
  }
  std::sort(oracle.begin(), oracle.end());
  CHECK(mbb_null_distribution(x, l, B, seed) == oracle);
}

TEST_CASE("iid bootstrap null is centred and seed-reproducible") {
  std::vector<double> x;
  Rng rng(9);
  for (int i = 0; i < 10; ++i) x.push_back(rng.normal());

  const auto d1 = mbb_null_distribution(x, 1, 2000, 5150);
  const auto d2 = mbb_null_distribution(x, 1, 2000, 5150);
  CHECK(d1 == d2);
  CHECK(std::is_sorted(d1.begin(), d1.end()));
  CHECK(d1.size() == 2000);

  double mean = 0.0;
  for (const long long v : d1) mean += static_cast<double>(v);
  mean /= static_cast<double>(d1.size());
  CHECK(std::fabs(mean) < 3.0);  // sd(S) ~ 11, so the mean of 2000 is ~0.25

  // seeds differing only in the low bits permute the replicate streams
  // (b ^ seed pairs them up), so the sorted null is unchanged; a distant
  // seed draws genuinely different replicates
  const auto d2b = mbb_null_distribution(x, 1, 2000, 5151);
  CHECK(d1 == d2b);
  const auto d3 = mbb_null_distribution(x, 1, 2000, 0x00ABCDEF12345678ULL);
  CHECK(d1 != d3);
}

TEST_CASE("mbb_mk_test flags a strong trend and spares white noise") {
  const AnnualSeries trended = line_series(30, 10.0, 0.5, 0.2, 42);
  MbbOptions opt;
  opt.b_replicates = 1000;
  opt.seed = 7;
  opt.keep_distribution = true;
  const TrendReport r = mbb_mk_test(trended, opt);
  CHECK(r.slope == doctest::Approx(0.5).epsilon(0.05));
  CHECK(r.significant);
  CHECK(r.p_bootstrap < 0.05);
  CHECK(r.n_years == 30);
  CHECK(r.block_length >= 1);
  CHECK(r.mk_s > 0);
  CHECK(r.z > 2.0);
  CHECK(r.s_star.size() == 1000);
  CHECK(significant_at(r, 0.05) == r.significant);

  const AnnualSeries flat = line_series(30, 10.0, 0.0, 1.0, 99);
  const TrendReport rf = mbb_mk_test(flat, opt);
  CHECK_FALSE(rf.significant);
  CHECK(rf.p_bootstrap > 0.05);

  // identical options reproduce the report bit for bit
  const TrendReport r2 = mbb_mk_test(trended, opt);
  CHECK(r2.slope == r.slope);
  CHECK(r2.mk_s == r.mk_s);
  CHECK(r2.p_bootstrap == r.p_bootstrap);
  CHECK(r2.s_star == r.s_star);
}

TEST_CASE("detrending first shortens the block length on a pure line") {
  AnnualSeries line;
  for (int i = 0; i < 12; ++i) {
    line.years.push_back(2000 + i);
    line.values.push_back(1.0 + 0.3 * i);
  }
  MbbOptions raw;
  raw.b_replicates = 200;
  const TrendReport r_raw = mbb_mk_test(line, raw);
  MbbOptions det = raw;
  det.detrend_first = true;
  const TrendReport r_det = mbb_mk_test(line, det);
  CHECK(r_det.block_length == 1);
  CHECK(r_det.autocorr_r == 0);
  CHECK(r_raw.block_length > r_det.block_length);
}

TEST_CASE("mbb_mk_test rejects bad options") {
  const AnnualSeries s = line_series(10, 0.0, 0.1, 0.5, 1);
  MbbOptions opt;
  opt.b_replicates = 99;
  CHECK_THROWS_AS(mbb_mk_test(s, opt), std::invalid_argument);
  opt.b_replicates = 100;
  opt.alpha = 0.5;
  CHECK_THROWS_AS(mbb_mk_test(s, opt), std::invalid_argument);
  opt.alpha = 0.05;
  opt.block_length = 6;  // needs n >= 12
  CHECK_THROWS_AS(mbb_mk_test(s, opt), std::runtime_error);
  opt.block_length = 5;
  CHECK(mbb_mk_test(s, opt).block_length == 5);

  CHECK_THROWS_AS(mbb_mk_test(line_series(2, 0.0, 0.1, 0.5, 1), {}),
                  std::invalid_argument);
  TrendReport no_dist;
  CHECK_THROWS_AS(significant_at(no_dist, 0.05), std::logic_error);
}

TEST_CASE("trend strings print per-decade values with subscripts") {
  const std::vector<double> products{0.032, 0.0351};
  CHECK(format_trend(0.034, true, 0.01, products) ==
        "0.34_{0.01} (0.32–0.35)");
  CHECK(format_trend(0.034, true, 0.05, products) ==
        "0.34_{0.05} (0.32–0.35)");
  CHECK(format_trend(0.034, false, 0.05, products) ==
        "0.34 (0.32–0.35)");
  CHECK(format_trend(0.034, true, 0.05, {}) == "0.34_{0.05}");
  CHECK(format_trend(-0.012, false, 0.05, {}) == "-0.12");
  // the range orders itself regardless of input order
  const std::vector<double> reversed{0.0351, 0.032};
  CHECK(format_trend(0.034, false, 0.05, reversed) ==
        "0.34 (0.32–0.35)");
}

TEST_CASE("two-level formatting picks the smallest passing alpha") {
  TrendReport r;
  r.slope = 0.034;
  for (long long s = -50; s < 50; ++s) r.s_star.push_back(s);
  const std::vector<double> products{0.032, 0.0351};

  r.mk_s = 49;  // outside the 0.5% tail
  CHECK(format_trend_two_level(r, products) == "0.34_{0.01} (0.32–0.35)");
  r.mk_s = 47;  // outside 2.5% but inside 0.5%
  CHECK(format_trend_two_level(r, products) == "0.34_{0.05} (0.32–0.35)");
  r.mk_s = 0;  // comfortably inside
  CHECK(format_trend_two_level(r, products) == "0.34 (0.32–0.35)");
}

TEST_CASE("trend_field recovers pixel-wise slopes deterministically") {
  GeoGrid g;
  g.lat_start = 40.0;
  g.lon_start = 0.0;
  g.dlat = 5.0;
  g.dlon = 5.0;
  g.nlat = 2;
  g.nlon = 2;

  const int n_years = 20;
  std::vector<Date> times;
  for (int y = 0; y < n_years; ++y) times.push_back(Date(1995 + y, 1, 1));
  GridField stack = make_field(g, times, "K", "t2m");
  Rng rng(1618);
  for (int y = 0; y < n_years; ++y) {
    stack.values[y * 4 + 0] = static_cast<float>(270.0 + 0.5 * y +
                                                 0.05 * rng.normal());
    stack.values[y * 4 + 1] = static_cast<float>(280.0 - 0.5 * y +
                                                 0.05 * rng.normal());
    stack.values[y * 4 + 2] = static_cast<float>(275.0 + 1.0 * rng.normal());
    // pixel 3 stays NaN
  }

  MbbOptions opt;
  opt.b_replicates = 500;
  opt.seed = 2718;
  const TrendFieldResult res = trend_field(stack, opt, 10, 1);
  CHECK(res.slope_per_decade.values[0] == doctest::Approx(5.0).epsilon(0.05));
  CHECK(res.slope_per_decade.values[1] == doctest::Approx(-5.0).epsilon(0.05));
  CHECK(res.significant.values[0] == 1.0f);
  CHECK(res.significant.values[1] == 1.0f);
  CHECK(std::isnan(res.slope_per_decade.values[3]));
  CHECK(std::isnan(res.p_value.values[3]));
  CHECK(res.skipped == 1);
  CHECK(res.slope_per_decade.units == "K per decade");
  CHECK(res.slope_per_decade.variable == "t2m_trend");

  // threading must not change a single bit
  const TrendFieldResult res4 = trend_field(stack, opt, 10, 4);
  for (std::size_t p = 0; p < 4; ++p) {
    const bool both_nan = std::isnan(res.slope_per_decade.values[p]) &&
                          std::isnan(res4.slope_per_decade.values[p]);
    if (!both_nan)
      CHECK(res.slope_per_decade.values[p] == res4.slope_per_decade.values[p]);
    const bool p_nan = std::isnan(res.p_value.values[p]) &&
                       std::isnan(res4.p_value.values[p]);
    if (!p_nan) CHECK(res.p_value.values[p] == res4.p_value.values[p]);
  }

  // a daily stack is not an annual stack
  std::vector<Date> daily;
  for (int d = 0; d < 20; ++d) daily.push_back(Date(2001, 1, 1) + d);
  GridField bad = make_field(g, daily, "K", "t2m");
  for (float& v : bad.values) v = 1.0f;
  CHECK_THROWS_AS(trend_field(bad, opt, 10, 1), std::invalid_argument);
}

TEST_CASE("trend agreement counts significant same-sign products") {
  GeoGrid g;
  g.lat_start = 50.0;
  g.lon_start = 0.0;
  g.dlat = 5.0;
  g.dlon = 90.0;
  g.nlat = 1;
  g.nlon = 4;
  const std::vector<Date> stamp{Date(2000, 1, 1)};

  auto product = [&](std::array<float, 4> slopes, std::array<float, 4> sig) {
    TrendFieldResult r{make_field(g, stamp, "K per decade", "t"),
                       make_field(g, stamp, "probability", "p"),
                       make_field(g, stamp, "flag", "s"), 0};
    for (int i = 0; i < 4; ++i) {
      r.slope_per_decade.values[i] = slopes[i];
      r.p_value.values[i] = 0.5f;
      r.significant.values[i] = sig[i];
    }
    return r;
  };

  // pixel 0: three significant warmers; pixel 1: 2 up vs 1 down;
  // pixel 2: one lonely signal; pixel 3: two significant coolers.
  const std::vector<TrendFieldResult> products{
      product({1.0f, 1.0f, 0.5f, -1.0f}, {1, 1, 1, 1}),
      product({2.0f, 1.5f, 0.5f, -0.5f}, {1, 1, 0, 1}),
      product({0.5f, -1.0f, 0.1f, 0.2f}, {1, 1, 0, 0}),
  };
  const TrendFieldResult ens = product({1.2f, 1.1f, 0.4f, -0.8f}, {1, 1, 1, 1});

  const AgreementResult agree = trend_agreement(products, ens);
  CHECK(agree.agreement.values[0] == 3.0f);
  CHECK(agree.agreement.values[1] == 2.0f);
  CHECK(agree.agreement.values[2] == 1.0f);
  CHECK(agree.agreement.values[3] == 2.0f);
  CHECK(agree.ensemble_slope_per_decade.values[0] == 1.2f);
  CHECK(agree.ensemble_slope_per_decade.values[1] == 1.1f);
  CHECK(std::isnan(agree.ensemble_slope_per_decade.values[2]));
  CHECK(agree.ensemble_slope_per_decade.values[3] == -0.8f);

  CHECK_THROWS_AS(trend_agreement({}, ens), std::invalid_argument);
}

TEST_CASE("splitmix64 matches the reference sequence") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(1) == 0x910a2dec89025cc1ULL);
  CHECK(splitmix64(0xDEADBEEFULL) == 0x4adfb90f68c9eb9bULL);
}
