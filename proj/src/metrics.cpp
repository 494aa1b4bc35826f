#include "snowtrend/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snowtrend {

ContingencyCounts contingency(const std::vector<bool>& estimates,
                              const std::vector<bool>& observations) {
  if (estimates.size() != observations.size())
    throw std::invalid_argument("contingency: size mismatch");
  ContingencyCounts c;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i] && observations[i]) ++c.hits;
    else if (!estimates[i] && observations[i]) ++c.misses;
    else if (estimates[i] && !observations[i]) ++c.false_alarms;
    else ++c.correct_negatives;
  }
  return c;
}

double pod(const ContingencyCounts& c) {
  const std::size_t den = c.hits + c.misses;
  if (den == 0) throw std::domain_error("pod: no observed events");
  return static_cast<double>(c.hits) / static_cast<double>(den);
}

double far(const ContingencyCounts& c) {
  const std::size_t den = c.hits + c.false_alarms;
  if (den == 0) throw std::domain_error("far: no predicted events");
  return static_cast<double>(c.false_alarms) / static_cast<double>(den);
}

double csi(const ContingencyCounts& c) {
  const std::size_t den = c.hits + c.misses + c.false_alarms;
  if (den == 0) throw std::domain_error("csi: no events on either side");
  return static_cast<double>(c.hits) / static_cast<double>(den);
}

namespace {

struct Moments {
  double mean;
  double sd;  // sample, n-1
};

Moments moments(std::span<const double> v) {
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

void check_pairs(std::span<const double> a, std::span<const double> b,
                 const char* what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": size mismatch");
  if (a.size() < 2)
    throw std::invalid_argument(std::string(what) + ": need at least 2 pairs");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw std::invalid_argument(std::string(what) + ": non-finite pair");
}

}  // namespace

double r2(std::span<const double> estimates,
          std::span<const double> observations) {
  check_pairs(estimates, observations, "r2");
  const Moments me = moments(estimates);
  const Moments mo = moments(observations);
  if (me.sd == 0.0 || mo.sd == 0.0)
    throw std::domain_error("r2: zero variance");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i)
    acc += (estimates[i] - me.mean) / me.sd * (observations[i] - mo.mean) /
           mo.sd;
  const double r = acc / static_cast<double>(estimates.size() - 1);
  return std::min(r * r, 1.0);
}

double rbias_percent(std::span<const double> estimates,
                     std::span<const double> observations) {
  check_pairs(estimates, observations, "rbias");
  double diff = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    diff += estimates[i] - observations[i];
    total += observations[i];
  }
  if (total == 0.0)
    throw std::domain_error("rbias: observations sum to zero");
  return diff / total * 100.0;
}

}  // namespace snowtrend
