#pragma once

// N pinching antennas on a single waveguide: spherical-wave effective channel,
// TDMA rates, their upper bounds, and the location search that aligns every
// antenna's total phase so the bound is met.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "pinchsim/errors.hpp"
#include "pinchsim/geometry.hpp"
#include "pinchsim/params.hpp"

namespace pinchsim {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct AntennaArray {
  std::vector<Point3> positions;
  Waveguide waveguide;
};

inline AntennaArray make_antenna_array(std::vector<Point3> positions, const Waveguide& wg,
                                       double guard_m) {
  if (positions.empty()) throw GeometryError("antenna array must be nonempty");
  for (const auto& p : positions) {
    if (!wg.on_line(p) || p.x < wg.x_min_m - 1e-9 || p.x > wg.x_max_m + 1e-9)
      throw GeometryError("antenna position off the waveguide");
  }
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (std::abs(positions[i].x - positions[i - 1].x) < guard_m - 1e-12)
      throw GeometryError("antenna spacing below the guard distance");
  }
  return AntennaArray{std::move(positions), wg};
}

// Total phase (propagation to the user plus travel along the waveguide)
// accumulated by the signal radiated from an antenna at x on the track.
// Unreduced: the placement search relies on its monotonicity in x.
inline double total_phase(const Point3& user, const Waveguide& wg, double x,
                          const DerivedConstants& c) {
  const Point3 a = wg.point_at(x);
  return kTwoPi * distance(user, a) / c.lambda_m +
         kTwoPi * std::abs(x - wg.feed_point.x) / c.guided_lambda_m;
}

// Same phase modulo one cycle, with each leg reduced before the sum; whole
// turns carry no information and dropping them keeps phasor sums well
// conditioned at large propagation distances.
inline double reduced_phase(double prop_dist, double guide_dist, const DerivedConstants& c) {
  return kTwoPi * (std::fmod(prop_dist / c.lambda_m, 1.0) +
                   std::fmod(guide_dist / c.guided_lambda_m, 1.0));
}

// Effective scalar channel seen by a user: sum of per-antenna free-space
// phasors, each rotated by the waveguide phase of its antenna.
inline Complex effective_channel(const Point3& user, const AntennaArray& array,
                                 const DerivedConstants& c) {
  if (array.positions.empty()) throw GeometryError("antenna array must be nonempty");
  const double se = std::sqrt(c.eta_m2);
  Complex h{0.0, 0.0};
  for (const auto& pos : array.positions) {
    const double r = distance(user, pos);
    if (!(r > 0.0)) throw GeometryError("user coincides with an antenna");
    const double phase = reduced_phase(r, distance(array.waveguide.feed_point, pos), c);
    h += std::polar(se / r, -phase);
  }
  return h;
}

// TDMA rate achieved by the array; the transmit power splits evenly over the
// N active antennas.
inline double rate_oma_array(const Point3& user, const AntennaArray& array, double power_w,
                             int num_users, const DerivedConstants& c) {
  const Complex h = effective_channel(user, array, c);
  const double n = static_cast<double>(array.positions.size());
  return std::log2(1.0 + std::norm(h) * power_w / (n * c.noise_w)) / num_users;
}

struct OmaBound {
  double at_positions;  // phases assumed perfectly aligned at the true antenna spots
  double clustered;     // additionally assumes all antennas sit at the closest point
};

inline OmaBound rate_oma_bound(const Point3& user, const AntennaArray& array, double power_w,
                               int num_users, const DerivedConstants& c) {
  if (array.positions.empty()) throw GeometryError("antenna array must be nonempty");
  const double se = std::sqrt(c.eta_m2);
  double amp = 0.0;
  for (const auto& pos : array.positions) {
    const double r = distance(user, pos);
    if (!(r > 0.0)) throw GeometryError("user coincides with an antenna");
    amp += se / r;
  }
  const double n = static_cast<double>(array.positions.size());
  OmaBound b{};
  b.at_positions = std::log2(1.0 + amp * amp * power_w / (n * c.noise_w)) / num_users;

  const double r0 = distance(user, array.waveguide.closest_point(user));
  b.clustered =
      std::log2(1.0 + n * power_w * c.eta_m2 / (c.noise_w * r0 * r0)) / num_users;
  return b;
}

namespace detail {

// First x >= x_start on [x_start, x_hi] where total_phase is an exact multiple
// of 2*pi. The phase is strictly monotone on each side of the feed point, so
// the search splits there and brackets one 2*pi level per piece.
inline bool first_aligned_position(const Point3& user, const Waveguide& wg,
                                   const DerivedConstants& c, double x_start, double* out) {
  auto phase = [&](double x) { return total_phase(user, wg, x, c); };

  std::vector<std::pair<double, double>> pieces;
  if (wg.feed_point.x > x_start && wg.feed_point.x < wg.x_max_m) {
    pieces.push_back({x_start, wg.feed_point.x});
    pieces.push_back({wg.feed_point.x, wg.x_max_m});
  } else {
    pieces.push_back({x_start, wg.x_max_m});
  }

  for (const auto& [lo, hi] : pieces) {
    if (!(lo < hi)) continue;
    const double plo = phase(lo);
    const double phi = phase(hi);
    const bool increasing = phi >= plo;
    double target;
    if (increasing) {
      target = kTwoPi * std::ceil(plo / kTwoPi);
      if (target > phi) continue;
    } else {
      target = kTwoPi * std::floor(plo / kTwoPi);
      if (target < phi) continue;
    }
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
      const double m = 0.5 * (a + b);
      const bool below = phase(m) < target;
      if (below == increasing)
        a = m;
      else
        b = m;
    }
    *out = 0.5 * (a + b);
    return true;
  }
  return false;
}

}  // namespace detail

// Place N antennas for one user: starting from the waveguide point closest to
// the user and walking toward the far end, take the first phase-aligned spot,
// then keep searching one guard distance past the previous antenna.
inline AntennaArray place_antennas_oma(const Point3& user, int num_antennas,
                                       const Waveguide& wg, const DerivedConstants& c) {
  if (num_antennas < 1) throw ParameterError("need at least one antenna");
  validate_waveguide(wg);

  std::vector<Point3> positions;
  positions.reserve(num_antennas);
  double x_start = std::clamp(user.x, wg.x_min_m, wg.x_max_m);
  for (int n = 0; n < num_antennas; ++n) {
    double x = 0.0;
    if (!detail::first_aligned_position(user, wg, c, x_start, &x)) {
      throw CapacityError("waveguide span hosts only " + std::to_string(n) + " of " +
                              std::to_string(num_antennas) + " requested antennas",
                          n);
    }
    positions.push_back(wg.point_at(x));
    x_start = x + c.guard_m;
    if (x_start > wg.x_max_m && n + 1 < num_antennas) {
      throw CapacityError("waveguide span hosts only " + std::to_string(n + 1) + " of " +
                              std::to_string(num_antennas) + " requested antennas",
                          n + 1);
    }
  }
  return AntennaArray{std::move(positions), wg};
}

}  // namespace pinchsim
