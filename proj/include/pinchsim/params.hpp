#pragma once

// Physical constants, unit conversions and derived carrier/waveguide
// quantities shared by every other module.

#include <cmath>
#include <numbers>
#include <optional>

#include "pinchsim/errors.hpp"

namespace pinchsim {

inline constexpr double kSpeedOfLightMps = 299'792'458.0;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Carrier and dielectric-waveguide parameters. The guard distance is the
// minimum spacing between active pinches; when unset it resolves to half a
// free-space wavelength.
struct PhysicalParams {
  double carrier_frequency_hz = 28e9;
  double noise_power_dbm = -90.0;
  double waveguide_height_m = 3.0;
  double refractive_index = 1.4;
  std::optional<double> guard_distance_m{};
};

struct DerivedConstants {
  double lambda_m;         // free-space wavelength, c / f_c
  double guided_lambda_m;  // wavelength inside the waveguide, lambda / n_eff
  double eta_m2;           // free-space path-loss constant, c^2 / (16 pi^2 f_c^2)
  double noise_w;
  double guard_m;
};

inline DerivedConstants derive_constants(const PhysicalParams& p) {
  if (!(p.carrier_frequency_hz > 0.0) || !std::isfinite(p.carrier_frequency_hz))
    throw ParameterError("carrier frequency must be positive and finite");
  if (!(p.refractive_index > 0.0) || !std::isfinite(p.refractive_index))
    throw ParameterError("refractive index must be positive and finite");
  if (!(p.waveguide_height_m > 0.0) || !std::isfinite(p.waveguide_height_m))
    throw ParameterError("waveguide height must be positive and finite");
  if (!std::isfinite(p.noise_power_dbm)) throw ParameterError("noise power must be finite");

  DerivedConstants c{};
  c.lambda_m = kSpeedOfLightMps / p.carrier_frequency_hz;
  c.guided_lambda_m = c.lambda_m / p.refractive_index;
  const double quarter_wave = kSpeedOfLightMps / (4.0 * std::numbers::pi * p.carrier_frequency_hz);
  c.eta_m2 = quarter_wave * quarter_wave;
  c.noise_w = dbm_to_watts(p.noise_power_dbm);
  c.guard_m = p.guard_distance_m.value_or(0.5 * c.lambda_m);
  if (!(c.guard_m > 0.0) || !std::isfinite(c.guard_m))
    throw ParameterError("guard distance must be positive and finite");
  return c;
}

}  // namespace pinchsim
