#pragma once

// Rate analysis for one conventional antenna vs. one pinching antenna on a
// single waveguide: instantaneous TDMA rates, closed-form ergodic sum rates,
// their high-SNR approximations and the high-SNR gap between the two systems.

#include <cmath>
#include <numbers>

#include "pinchsim/errors.hpp"
#include "pinchsim/geometry.hpp"
#include "pinchsim/params.hpp"

namespace pinchsim {

inline constexpr double kLog2E = std::numbers::log2e;

// Transmit power, carrier parameters and deployment size of one operating
// point. `gamma` collects eta * P / sigma^2, the SNR scale that appears next
// to squared distances everywhere below.
struct SnrOperatingPoint {
  double transmit_power_dbm = 30.0;
  PhysicalParams params{};
  int num_users = 1;
  double region_side_m = 10.0;

  double power_w() const { return dbm_to_watts(transmit_power_dbm); }

  double gamma(const DerivedConstants& c) const {
    return c.eta_m2 * power_w() / c.noise_w;
  }

  double gamma() const { return gamma(derive_constants(params)); }

  void validate() const {
    if (num_users < 1) throw ParameterError("num_users must be >= 1");
    if (!(region_side_m > 0.0)) throw ParameterError("region side must be positive");
    if (!(gamma() > 0.0)) throw ParameterError("derived SNR scale must be positive");
  }
};

// TDMA rate of a user served by a fixed antenna at `antenna`.
inline double rate_conventional_instant(const Point3& user, const Point3& antenna,
                                        double power_w, int num_users,
                                        const DerivedConstants& c) {
  if (!(antenna.z > 0.0)) throw ParameterError("antenna height must be positive");
  const double r2 = [&] {
    const double d = distance(user, antenna);
    return d * d;
  }();
  return std::log2(1.0 + c.eta_m2 * power_w / (r2 * c.noise_w)) / num_users;
}

// TDMA rate of a user served by a pinching antenna moved to the waveguide
// point closest to the user. The waveguide runs above y = 0, so only the
// user's y-offset and the height matter.
inline double rate_pinching_instant(const Point3& user, double power_w, int num_users,
                                    const DerivedConstants& c, double height_m) {
  if (!(height_m > 0.0)) throw ParameterError("waveguide height must be positive");
  const double r2 = height_m * height_m + user.y * user.y;
  return std::log2(1.0 + c.eta_m2 * power_w / (r2 * c.noise_w)) / num_users;
}

// Closed form of the integral of log2(y^2 + a) over y in [0, D/2].
inline double g_closed(double a, double D) {
  if (!(a > 0.0)) throw ParameterError("g_closed requires a > 0");
  if (D == 0.0) return 0.0;
  const double sa = std::sqrt(a);
  return 0.5 * D * std::log2(0.25 * D * D + a) - kLog2E * D +
         2.0 * kLog2E * sa * std::atan(0.5 * D / sa);
}

// Closed form of the integral of ln(z + a) over z in [0, D^2/4].
inline double g2_closed(double a, double D) {
  if (!(a > 0.0)) throw ParameterError("g2_closed requires a > 0");
  const double q = 0.25 * D * D;
  return q * std::log(q + a) - q + a * std::log1p(q / a);
}

// Ergodic sum rate of a single pinching antenna serving users uniformly
// deployed in a square of side D (exact closed form).
inline double ergodic_sum_rate_pinching(const SnrOperatingPoint& op) {
  op.validate();
  const DerivedConstants c = derive_constants(op.params);
  const double D = op.region_side_m;
  const double d = op.params.waveguide_height_m;
  const double g = op.gamma(c);
  const double a1 = d * d + g;
  const double sa1 = std::sqrt(a1);
  return std::log2(0.25 * D * D + a1) +
         (4.0 / D) * kLog2E * sa1 * std::atan(0.5 * D / sa1) -
         std::log2(0.25 * D * D + d * d) -
         (4.0 / D) * kLog2E * d * std::atan(0.5 * D / d);
}

// High-SNR approximation of the pinching-antenna ergodic sum rate.
inline double ergodic_sum_rate_pinching_highsnr(const SnrOperatingPoint& op) {
  op.validate();
  const DerivedConstants c = derive_constants(op.params);
  const double D = op.region_side_m;
  const double d = op.params.waveguide_height_m;
  const double g = op.gamma(c);
  return std::log2(0.25 * D * D + d * d + g) + 2.0 * kLog2E -
         std::log2(0.25 * D * D + d * d) -
         (4.0 / D) * kLog2E * d * std::atan(0.5 * D / d);
}

// Upper bound on the conventional-antenna ergodic sum rate, obtained by
// relaxing the square deployment to the enclosing-area disc.
inline double ergodic_sum_rate_conventional_bound(const SnrOperatingPoint& op) {
  op.validate();
  const DerivedConstants c = derive_constants(op.params);
  const double D = op.region_side_m;
  const double d = op.params.waveguide_height_m;
  const double g = op.gamma(c);
  return (4.0 / (D * D)) * kLog2E * (g2_closed(d * d + g, D) - g2_closed(d * d, D));
}

// High-SNR approximation of the conventional-antenna bound.
inline double ergodic_sum_rate_conventional_bound_highsnr(const SnrOperatingPoint& op) {
  op.validate();
  const DerivedConstants c = derive_constants(op.params);
  const double D = op.region_side_m;
  const double d = op.params.waveguide_height_m;
  const double g = op.gamma(c);
  const double q = 0.25 * D * D;
  return std::log2(q + d * d + g) + kLog2E - std::log2(q + d * d) -
         (d * d / q) * std::log2((q + d * d) / (d * d));
}

// g3/g4/g5 below form the monotonicity chain proving the high-SNR rate gap
// grows with D/d. Each is extended by continuity at x = 0 with a short series
// so the limit values are exact and free of cancellation.

inline double g3(double x) {
  if (!(x >= 0.0)) throw ParameterError("g3 requires x >= 0");
  if (x < 1e-4) {
    const double x2 = x * x;
    return kLog2E * x2 * (1.0 / 6.0 - x2 / 15.0);
  }
  return kLog2E - (2.0 / x) * kLog2E * std::atan(x) +
         kLog2E * std::log1p(x * x) / (x * x);
}

inline double g4(double x) {
  if (!(x >= 0.0)) throw ParameterError("g4 requires x >= 0");
  if (x < 1e-4) {
    const double x2 = x * x;
    return kLog2E * x * x2 * (1.0 / 6.0 - 2.0 * x2 / 15.0);
  }
  return kLog2E * std::atan(x) - kLog2E * std::log1p(x * x) / x;
}

inline double g5(double x) {
  if (!(x >= 0.0)) throw ParameterError("g5 requires x >= 0");
  if (x < 1e-3) {
    const double x2 = x * x;
    return kLog2E * x2 * x2 * (0.5 - 2.0 * x2 / 3.0);
  }
  const double x2 = x * x;
  return kLog2E * (std::log1p(x2) - x2 / (1.0 + x2));
}

// High-SNR ergodic sum-rate gap between the pinching system and the
// conventional bound; depends on the geometry only through D / (2d).
inline double rate_gap_highsnr(double D, double d) {
  if (!(D > 0.0) || !(d > 0.0)) throw ParameterError("rate_gap_highsnr requires D, d > 0");
  return g3(0.5 * D / d);
}

}  // namespace pinchsim
