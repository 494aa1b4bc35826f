#include "snowtrend/thermo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "snowtrend/parallel.hpp"

namespace snowtrend {

namespace {

constexpr double kMinTempK = 150.0;   // far above the 32.19 K singularity
constexpr double kMinPressureMb = 100.0;
constexpr double kBracketDepthK = 60.0;
constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

void check_temperature(double t_k, const char* what) {
  if (!(t_k > kMinTempK))
    throw std::domain_error(std::string(what) + " non-physical: " +
                            std::to_string(t_k) + " K");
}

void check_same_layout(const GridField& a, const GridField& b,
                       const char* what) {
  if (a.grid != b.grid)
    throw std::invalid_argument(std::string(what) + ": grids differ");
  if (a.times != b.times)
    throw std::invalid_argument(std::string(what) + ": time axes differ");
}

}  // namespace

double rh_from_dewpoint(double t_air_k, double t_dew_k) {
  check_temperature(t_air_k, "air temperature");
  check_temperature(t_dew_k, "dew point");
  if (t_dew_k > t_air_k) t_dew_k = t_air_k;  // supersaturation clamp
  const auto h = [](double t) { return (t - 273.16) / (t - 32.19); };
  return std::exp(17.502 * (h(t_dew_k) - h(t_air_k)));
}

WetBulbError::WetBulbError(const std::string& msg, double last, double resid)
    : std::runtime_error(msg), last_iterate(last), residual(resid) {}

double wet_bulb_residual(double t_w, const AtmosState& s,
                         const PsychroConstants& pc) {
  const double c = pc.latent_heat * pc.gas_ratio * pc.sat_a_mb /
                   pc.specific_heat;
  const double denom_w = s.pressure_mb * std::exp(pc.sat_b_k / t_w) - pc.sat_a_mb;
  const double denom_a =
      s.pressure_mb * std::exp(pc.sat_b_k / s.t_air_k) - pc.sat_a_mb;
  return t_w - s.t_air_k + c * (1.0 / denom_w - s.rh / denom_a);
}

double wet_bulb(const AtmosState& s, const PsychroConstants& pc, double tol_k,
                int max_iter) {
  check_temperature(s.t_air_k, "air temperature");
  if (!(s.rh > 0.0) || s.rh > 1.0)
    throw std::invalid_argument("relative humidity outside (0, 1]: " +
                                std::to_string(s.rh));
  if (!(s.pressure_mb > kMinPressureMb))
    throw std::domain_error("pressure non-physical: " +
                            std::to_string(s.pressure_mb) + " mb");
  const double denom_air =
      s.pressure_mb * std::exp(pc.sat_b_k / s.t_air_k) - pc.sat_a_mb;
  if (!(denom_air > 0.0))
    throw std::domain_error("state outside the saturation-fit validity range");
  if (s.rh == 1.0) return s.t_air_k;  // saturated air is its own wet bulb

  const double c = pc.latent_heat * pc.gas_ratio * pc.sat_a_mb /
                   pc.specific_heat;
  const double air_term = s.rh / denom_air;
  const auto residual = [&](double tw) {
    const double denom =
        s.pressure_mb * std::exp(pc.sat_b_k / tw) - pc.sat_a_mb;
    return tw - s.t_air_k + c * (1.0 / denom - air_term);
  };

  // The residual increases in t_w, so the root sits below t_air; keep a
  // bracket and fall back to its midpoint when Newton steps outside it.
  double lo = s.t_air_k - kBracketDepthK;
  double hi = s.t_air_k;
  double tw = s.t_air_k;
  double g = residual(tw);
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(g) < tol_k) return std::min(tw, s.t_air_k);
    if (g > 0.0)
      hi = std::min(hi, tw);
    else
      lo = std::max(lo, tw);
    const double denom =
        s.pressure_mb * std::exp(pc.sat_b_k / tw) - pc.sat_a_mb;
    const double slope = 1.0 + c * pc.sat_b_k * s.pressure_mb *
                                   std::exp(pc.sat_b_k / tw) /
                                   (tw * tw * denom * denom);
    double next = tw - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    tw = next;
    g = residual(tw);
  }
  throw WetBulbError("wet-bulb iteration did not converge", tw, g);
}

ThermoFieldResult rh_from_dewpoint_field(const GridField& t_air,
                                         const GridField& t_dew) {
  validate_field(t_air);
  validate_field(t_dew);
  check_same_layout(t_air, t_dew, "rh_from_dewpoint_field");

  ThermoFieldResult result{make_field(t_air.grid, t_air.times, "fraction",
                                      "relative_humidity"),
                           0};
  for (std::size_t p = 0; p < t_air.values.size(); ++p) {
    const float ta = t_air.values[p];
    const float td = t_dew.values[p];
    if (std::isnan(ta) || std::isnan(td)) {
      result.field.values[p] = kNaN;
      continue;
    }
    if (td > ta) ++result.clamped;
    result.field.values[p] = static_cast<float>(rh_from_dewpoint(ta, td));
  }
  return result;
}

ThermoFieldResult wet_bulb_field(const GridField& t_air, const GridField& rh,
                                 const GridField& pressure,
                                 const PsychroConstants& pc, double tol_k,
                                 int max_iter, int threads) {
  validate_field(t_air);
  validate_field(rh);
  validate_field(pressure);
  check_same_layout(t_air, rh, "wet_bulb_field");
  check_same_layout(t_air, pressure, "wet_bulb_field");
  if (t_air.units != "K")
    throw std::invalid_argument("air temperature must be in K, got '" +
                                t_air.units + "'");
  if (pressure.units != "mb" && pressure.units != "hPa")
    throw std::invalid_argument("pressure must be in mb/hPa, got '" +
                                pressure.units + "'");

  ThermoFieldResult result{
      make_field(t_air.grid, t_air.times, "K", "wet_bulb"), 0};
  std::atomic<std::size_t> clamped{0};
  parallel_for(t_air.values.size(), threads,
               [&](std::size_t begin, std::size_t end) {
    std::size_t local_clamped = 0;
    for (std::size_t p = begin; p < end; ++p) {
      const float ta = t_air.values[p];
      const float h = rh.values[p];
      const float pr = pressure.values[p];
      if (std::isnan(ta) || std::isnan(h) || std::isnan(pr)) {
        result.field.values[p] = kNaN;
        continue;
      }
      double hv = h;
      if (hv > 1.0) {
        hv = 1.0;
        ++local_clamped;
      }
      result.field.values[p] = static_cast<float>(
          wet_bulb({ta, hv, pr}, pc, tol_k, max_iter));
    }
    clamped += local_clamped;
  });
  result.clamped = clamped;
  return result;
}

}  // namespace snowtrend
