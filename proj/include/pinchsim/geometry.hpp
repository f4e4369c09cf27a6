#pragma once

// Cartesian coordinates, waveguide layout and user-deployment regions.
// Users live in the z = 0 plane; waveguides run parallel to the x-axis at a
// fixed height.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pinchsim/errors.hpp"
#include "pinchsim/params.hpp"

namespace pinchsim {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Point3& a, const Point3& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

// A straight dielectric waveguide parallel to the x-axis. The feed point is
// where the signal enters; it defaults to the left end.
struct Waveguide {
  double y_offset_m = 0.0;
  double height_m = 3.0;
  double x_min_m = 0.0;
  double x_max_m = 1.0;
  Point3 feed_point{0.0, 0.0, 3.0};

  Point3 point_at(double x) const { return {x, y_offset_m, height_m}; }

  // Point on the waveguide closest to `p` (x clamped to the span).
  Point3 closest_point(const Point3& p) const {
    return point_at(std::clamp(p.x, x_min_m, x_max_m));
  }

  bool on_line(const Point3& p, double tol = 1e-9) const {
    return std::abs(p.y - y_offset_m) <= tol && std::abs(p.z - height_m) <= tol;
  }
};

inline Waveguide make_waveguide(double y_offset_m, double height_m, double x_min_m,
                                double x_max_m) {
  if (!(x_min_m < x_max_m)) throw GeometryError("waveguide span requires x_min < x_max");
  if (!(height_m > 0.0)) throw GeometryError("waveguide height must be positive");
  Waveguide wg{y_offset_m, height_m, x_min_m, x_max_m, {x_min_m, y_offset_m, height_m}};
  return wg;
}

inline void validate_waveguide(const Waveguide& wg) {
  if (!(wg.x_min_m < wg.x_max_m)) throw GeometryError("waveguide span requires x_min < x_max");
  if (!(wg.height_m > 0.0)) throw GeometryError("waveguide height must be positive");
  if (!wg.on_line(wg.feed_point) || wg.feed_point.x < wg.x_min_m ||
      wg.feed_point.x > wg.x_max_m)
    throw GeometryError("feed point must lie on the waveguide span");
}

// Phase accumulated by a signal travelling along the waveguide from the feed
// to an antenna attached at `antenna`.
inline double waveguide_phase(const Point3& feed, const Point3& antenna,
                              double guided_lambda_m) {
  if (std::abs(feed.y - antenna.y) > 1e-9 || std::abs(feed.z - antenna.z) > 1e-9)
    throw GeometryError("antenna does not lie on the waveguide carrying the feed");
  if (!(guided_lambda_m > 0.0)) throw ParameterError("guided wavelength must be positive");
  return 2.0 * std::numbers::pi * distance(feed, antenna) / guided_lambda_m;
}

enum class DeploymentKind { kSquare, kRectangle, kNomaAreas, kMisoRectangles };

// One axis-aligned user region centred at `center` in the z = 0 plane.
struct Region {
  Point3 center{0.0, 0.0, 0.0};
  double side_x_m = 1.0;
  double side_y_m = 1.0;
};

// A deployment is a list of regions users are drawn from, tagged with the
// scenario family it belongs to.
struct Deployment {
  DeploymentKind kind = DeploymentKind::kSquare;
  std::vector<Region> regions;

  static Deployment square(const Point3& center, double side_m) {
    Deployment d{DeploymentKind::kSquare, {{center, side_m, side_m}}};
    validate(d);
    return d;
  }

  static Deployment rectangle(const Point3& center, double side_x_m, double side_y_m) {
    Deployment d{DeploymentKind::kRectangle, {{center, side_x_m, side_y_m}}};
    validate(d);
    return d;
  }

  static Deployment noma_pair(const Point3& area1_center, const Point3& area2_center,
                              double side_m) {
    Deployment d{DeploymentKind::kNomaAreas,
                 {{area1_center, side_m, side_m}, {area2_center, side_m, side_m}}};
    validate(d);
    return d;
  }

  static Deployment noma_areas(const std::vector<Point3>& centers, double side_m) {
    Deployment d{DeploymentKind::kNomaAreas, {}};
    for (const auto& c : centers) d.regions.push_back({c, side_m, side_m});
    validate(d);
    return d;
  }

  // Square of side D split by two waveguides at y = +-D/3: users of interest
  // live in the outer rectangles (index 0 upper, 1 lower).
  static Deployment miso_rectangles(const Point3& center, double side_m) {
    const double strip = side_m / 2.0 - side_m / 3.0;
    Deployment d{DeploymentKind::kMisoRectangles,
                 {{{center.x, center.y + side_m / 3.0 + strip / 2.0, 0.0}, side_m, strip},
                  {{center.x, center.y - side_m / 3.0 - strip / 2.0, 0.0}, side_m, strip}}};
    validate(d);
    return d;
  }

  static void validate(const Deployment& d) {
    if (d.regions.empty()) throw GeometryError("deployment needs at least one region");
    for (const auto& r : d.regions) {
      if (!(r.side_x_m > 0.0) || !(r.side_y_m > 0.0))
        throw GeometryError("region side lengths must be strictly positive");
      if (r.center.z != 0.0) throw GeometryError("user regions lie in the z = 0 plane");
    }
  }
};

// Smallest x-interval covering every region of the deployment.
inline std::pair<double, double> x_extent(const Deployment& d) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& r : d.regions) {
    lo = std::min(lo, r.center.x - r.side_x_m / 2.0);
    hi = std::max(hi, r.center.x + r.side_x_m / 2.0);
  }
  return {lo, hi};
}

}  // namespace pinchsim
