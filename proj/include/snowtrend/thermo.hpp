#pragma once

#include <stdexcept>
#include <string>

#include "snowtrend/field.hpp"

namespace snowtrend {

// Psychrometric constants for the saturation vapour-pressure fit
// e_s(T) = A * exp(-B / T) and the latent-heat balance.
struct PsychroConstants {
  double latent_heat = 2.501e6;    // J/kg, vaporization
  double specific_heat = 1005.0;   // J/(kg K), dry air at constant pressure
  double gas_ratio = 0.622;        // vapour/dry-air gas-constant ratio
  double sat_a_mb = 2.53e9;        // mb
  double sat_b_k = 5420.0;         // K
};

struct AtmosState {
  double t_air_k = 0.0;
  double rh = 0.0;          // fraction in (0, 1]
  double pressure_mb = 0.0;
};

// Relative humidity from dew point. Dew points above the air temperature
// clamp to saturation; the field-level wrapper counts such pixels.
double rh_from_dewpoint(double t_air_k, double t_dew_k);

class WetBulbError : public std::runtime_error {
public:
  WetBulbError(const std::string& msg, double last_iterate, double residual);
  double last_iterate;
  double residual;
};

// Implicit wet-bulb balance evaluated at t_w: zero at the solution, positive
// above it. Exposed so callers can check solutions independently.
double wet_bulb_residual(double t_w, const AtmosState& state,
                         const PsychroConstants& pc = {});

// Wet-bulb temperature by Newton iteration from t_air, with a bisection
// fallback on [t_air - 60, t_air] whenever a Newton step leaves the bracket.
// Returns the first iterate with |residual| < tol_k; throws WetBulbError
// (carrying the last iterate) if max_iter is exhausted.
double wet_bulb(const AtmosState& state, const PsychroConstants& pc = {},
                double tol_k = 1e-6, int max_iter = 50);

struct ThermoFieldResult {
  GridField field;
  std::size_t clamped = 0;  // pixels pushed back into the physical range
};

ThermoFieldResult rh_from_dewpoint_field(const GridField& t_air,
                                         const GridField& t_dew);

// Pointwise wet-bulb over co-registered air-temperature (K), relative
// humidity (fraction) and pressure (mb) cubes. NaN in any input yields NaN;
// rh marginally above 1 clamps to saturation and is counted.
ThermoFieldResult wet_bulb_field(const GridField& t_air, const GridField& rh,
                                 const GridField& pressure,
                                 const PsychroConstants& pc = {},
                                 double tol_k = 1e-6, int max_iter = 50,
                                 int threads = 1);

}  // namespace snowtrend
