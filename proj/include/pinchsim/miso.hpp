#pragma once

// Two-user, two-waveguide MISO interference channel: channel matrix with
// propagation and waveguide phases, MRC/ZF/phase-matched beamformers, the
// single-user SINR upper bound, the orthogonality constraints under which the
// bound becomes achievable, a constructive placement for the symmetric case,
// and the exhaustive max-min location search.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "pinchsim/errors.hpp"
#include "pinchsim/geometry.hpp"
#include "pinchsim/params.hpp"
#include "pinchsim/waveguide_array.hpp"

namespace pinchsim {

using Cvec2 = std::array<Complex, 2>;

inline Complex hdot(const Cvec2& a, const Cvec2& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

inline double norm2(const Cvec2& a) { return std::norm(a[0]) + std::norm(a[1]); }

struct MisoScenario {
  std::array<Point3, 2> users;
  std::array<Waveguide, 2> waveguides;
  std::array<Point3, 2> antennas;  // antenna k rides waveguide k
  double rho = 1.0;                // transmit power over noise power
  PhysicalParams params{};

  void validate() const {
    if (!(rho > 0.0)) throw ParameterError("rho must be positive");
    for (int k = 0; k < 2; ++k) {
      validate_waveguide(waveguides[k]);
      if (!waveguides[k].on_line(antennas[k]))
        throw GeometryError("antenna must lie on its own waveguide");
    }
  }
};

// rows[m][k] = channel from the antenna on waveguide k to user m.
struct ChannelMatrix {
  std::array<Cvec2, 2> rows;
};

// columns[m] = beamforming vector for user m's signal; unit Euclidean norm.
struct BeamformingMatrix {
  std::array<Cvec2, 2> columns;

  void validate() const {
    for (const auto& col : columns)
      if (std::abs(norm2(col) - 1.0) > 1e-12)
        throw ParameterError("beamforming columns must have unit norm");
  }
};

inline Complex miso_channel_entry(const Point3& user, const Point3& antenna,
                                  const Point3& feed, const DerivedConstants& c) {
  const double r = distance(user, antenna);
  if (!(r > 0.0)) throw GeometryError("user coincides with an antenna");
  return std::polar(std::sqrt(c.eta_m2) / r,
                    -reduced_phase(r, distance(feed, antenna), c));
}

inline ChannelMatrix channel_matrix(const MisoScenario& s) {
  s.validate();
  const DerivedConstants c = derive_constants(s.params);
  ChannelMatrix h;
  for (int m = 0; m < 2; ++m)
    for (int k = 0; k < 2; ++k)
      h.rows[m][k] =
          miso_channel_entry(s.users[m], s.antennas[k], s.waveguides[k].feed_point, c);
  return h;
}

// Channel matrix for two fixed antennas fed directly (no waveguide phase);
// the conventional-antenna benchmark.
inline ChannelMatrix fixed_antenna_channel_matrix(const std::array<Point3, 2>& users,
                                                  const std::array<Point3, 2>& antennas,
                                                  const DerivedConstants& c) {
  ChannelMatrix h;
  for (int m = 0; m < 2; ++m)
    for (int k = 0; k < 2; ++k)
      h.rows[m][k] = miso_channel_entry(users[m], antennas[k], antennas[k], c);
  return h;
}

inline std::array<double, 2> sinr(const ChannelMatrix& h, const BeamformingMatrix& p,
                                  double rho) {
  std::array<double, 2> out{};
  for (int m = 0; m < 2; ++m) {
    const double signal = std::norm(hdot(h.rows[m], p.columns[m]));
    const double interference = std::norm(hdot(h.rows[m], p.columns[1 - m]));
    out[m] = rho * signal / (rho * interference + 1.0);
  }
  return out;
}

inline std::array<double, 2> sinr_upper_bound(const ChannelMatrix& h, double rho) {
  return {rho * norm2(h.rows[0]), rho * norm2(h.rows[1])};
}

inline BeamformingMatrix mrc_beamformer(const ChannelMatrix& h) {
  BeamformingMatrix p;
  for (int m = 0; m < 2; ++m) {
    const double n = std::sqrt(norm2(h.rows[m]));
    if (!(n > 0.0)) throw ParameterError("zero channel handed to MRC");
    p.columns[m] = {h.rows[m][0] / n, h.rows[m][1] / n};
  }
  return p;
}

// Zero-forcing: column m is the unit vector orthogonal to the other user's
// channel, phase-rotated so the own-channel product is real and positive.
inline BeamformingMatrix zf_beamformer(const ChannelMatrix& h) {
  const Cvec2& h1 = h.rows[0];
  const Cvec2& h2 = h.rows[1];
  const double n1 = norm2(h1);
  const double n2 = norm2(h2);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw ParameterError("zero channel handed to ZF");
  const Complex det = h1[0] * h2[1] - h1[1] * h2[0];
  if (std::norm(det) <= 1e-20 * n1 * n2)
    throw SingularityError("collinear channels: zero-forcing is singular");

  BeamformingMatrix p;
  for (int m = 0; m < 2; ++m) {
    const Cvec2& other = h.rows[1 - m];
    Cvec2 col{-std::conj(other[1]), std::conj(other[0])};
    const Complex self = hdot(h.rows[m], col);
    const double cn = std::sqrt(norm2(col));
    const Complex rot = std::conj(self) / std::abs(self);
    p.columns[m] = {col[0] * rot / cn, col[1] * rot / cn};
  }
  return p;
}

// Beamformer built directly from the geometry: entry (m, k) carries the
// inverse distance from user m to antenna k and cancels the total phase of the
// own-user channel entry (waveguide phase included), normalized to unit
// columns. Column m equals the MRC column up to a global phase, but is
// constructed without touching the channel matrix.
inline BeamformingMatrix phase_matched_beamformer(const MisoScenario& s) {
  s.validate();
  const DerivedConstants c = derive_constants(s.params);
  BeamformingMatrix p;
  for (int m = 0; m < 2; ++m) {
    const double dist0 = distance(s.users[m], s.antennas[0]);
    const double dist1 = distance(s.users[m], s.antennas[1]);
    if (!(dist0 > 0.0) || !(dist1 > 0.0))
      throw GeometryError("user coincides with an antenna");
    const double normalizer =
        1.0 / std::sqrt(1.0 / (dist0 * dist0) + 1.0 / (dist1 * dist1));
    const double dists[2] = {dist0, dist1};
    for (int k = 0; k < 2; ++k) {
      const double phase = reduced_phase(
          dists[k], distance(s.waveguides[k].feed_point, s.antennas[k]), c);
      p.columns[m][k] = std::polar(normalizer / dists[k], -phase);
    }
  }
  return p;
}

struct OrthogonalityResidual {
  Complex cross;       // residual interference amplitude h_1^H p_2
  double constraint1;  // distance of the length combination from the nearest odd lambda/2
  double constraint2;  // deviation of the distance-product ratio from 1
};

// Distance of `value` from the nearest odd multiple of `step`.
inline double odd_multiple_residual(double value, double step) {
  const double t = value / step;
  double k = std::round((t - 1.0) / 2.0) * 2.0 + 1.0;  // nearest odd integer
  return std::abs(value - k * step);
}

inline OrthogonalityResidual orthogonality_residual(const MisoScenario& s) {
  const ChannelMatrix h = channel_matrix(s);
  const BeamformingMatrix p = phase_matched_beamformer(s);
  const DerivedConstants c = derive_constants(s.params);

  const double d11 = distance(s.users[0], s.antennas[0]);
  const double d21 = distance(s.users[1], s.antennas[0]);
  const double d12 = distance(s.users[0], s.antennas[1]);
  const double d22 = distance(s.users[1], s.antennas[1]);

  OrthogonalityResidual r;
  r.cross = hdot(h.rows[0], p.columns[1]);
  r.constraint1 = odd_multiple_residual(d11 - d21 - d12 + d22, 0.5 * c.lambda_m);
  r.constraint2 = std::abs((d11 * d21) / (d12 * d22) - 1.0);
  return r;
}

struct SymmetricPlacement {
  double delta = 0.0;                // common offset of both antennas toward the middle
  std::array<Point3, 2> antennas{};  // (x1 + delta, +D/3, d) and (x2 - delta, -D/3, d)
  long long k = 0;                   // odd index of the satisfied length constraint
};

// Constructive placement for two users on the x-axis at (x1,0,0), (x2,0,0)
// with waveguides at y = +-D/3: mirrored offsets keep the distance-product
// ratio at exactly 1, and the offset is solved so the length combination hits
// an odd multiple of lambda/2. Candidate odd indices bracket the value at
// delta = 0 and the solution with the smaller offset wins.
inline SymmetricPlacement symmetric_feasible_placement(double x1, double x2, double D,
                                                       double d,
                                                       const PhysicalParams& params) {
  if (!(x1 < x2)) throw GeometryError("users must satisfy x1 < x2");
  if (!(D > 0.0) || !(d > 0.0)) throw GeometryError("D and d must be positive");
  const DerivedConstants c = derive_constants(params);
  const double cross2 = D * D / 9.0 + d * d;

  auto f = [&](double x) {
    return std::sqrt((x - x1) * (x - x1) + cross2) - std::sqrt((x - x2) * (x - x2) + cross2);
  };

  const double mid = 0.5 * (x1 + x2);
  const double f_lo = f(x1);  // most negative value, at delta = 0
  const double step = 0.25 * c.lambda_m;

  const double t0 = f_lo / step;
  const long long k_up = [&] {
    long long k = static_cast<long long>(std::ceil(t0));
    if ((k % 2 + 2) % 2 == 0) ++k;
    return k;
  }();
  const long long k_dn = [&] {
    long long k = static_cast<long long>(std::floor(t0));
    if ((k % 2 + 2) % 2 == 0) --k;
    return k;
  }();

  SymmetricPlacement best;
  bool found = false;
  for (long long k : {k_up, k_dn}) {
    const double target = k * step;
    if (target < f_lo || target > 0.0) continue;  // f spans [f(x1), 0] on [x1, mid]
    double a = x1, b = mid;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
      const double m = 0.5 * (a + b);
      (f(m) < target ? a : b) = m;
    }
    const double x = 0.5 * (a + b);
    const double delta = x - x1;
    if (!found || delta < best.delta) {
      best.delta = delta;
      best.k = k;
      found = true;
    }
  }
  if (!found) {
    throw InfeasibleError(
        "no odd quarter-wavelength level lies in the achievable range; widen |x1 - x2|",
        f_lo, 0.0);
  }
  best.antennas = {Point3{x1 + best.delta, D / 3.0, d}, Point3{x2 - best.delta, -D / 3.0, d}};
  return best;
}

struct SearchResult {
  std::array<Point3, 2> antennas{};
  BeamformingMatrix beamformers{};
  std::array<double, 2> sinrs{};
  std::size_t index1 = 0;
  std::size_t index2 = 0;
};

// Exhaustive max-min SINR search over candidate antenna x-positions, one grid
// per waveguide, using ZF in every cell. Per-axis channel columns are
// precomputed; cells with collinear channels are skipped. Ties break toward
// the lexicographically smallest index pair, so any evaluation order gives
// the same result.
inline SearchResult algorithm1_search(const MisoScenario& scenario_template,
                                      const std::vector<double>& grid1,
                                      const std::vector<double>& grid2) {
  if (grid1.empty() || grid2.empty()) throw SearchError("search grids must be nonempty");
  MisoScenario s = scenario_template;
  s.validate();
  const DerivedConstants c = derive_constants(s.params);

  // col_a[m][i]: channel of user m through waveguide 0 with its antenna at grid1[i].
  std::array<std::vector<Complex>, 2> col_a, col_b;
  for (int m = 0; m < 2; ++m) {
    col_a[m].reserve(grid1.size());
    col_b[m].reserve(grid2.size());
    for (double x : grid1)
      col_a[m].push_back(miso_channel_entry(s.users[m], s.waveguides[0].point_at(x),
                                            s.waveguides[0].feed_point, c));
    for (double x : grid2)
      col_b[m].push_back(miso_channel_entry(s.users[m], s.waveguides[1].point_at(x),
                                            s.waveguides[1].feed_point, c));
  }

  double best_min = -1.0;
  std::size_t best_i = 0, best_j = 0;
  bool found = false;
  for (std::size_t i = 0; i < grid1.size(); ++i) {
    for (std::size_t j = 0; j < grid2.size(); ++j) {
      const double n1 = std::norm(col_a[0][i]) + std::norm(col_b[0][j]);
      const double n2 = std::norm(col_a[1][i]) + std::norm(col_b[1][j]);
      const Complex cross = std::conj(col_a[0][i]) * col_a[1][i] +
                            std::conj(col_b[0][j]) * col_b[1][j];
      const double c2 = std::norm(cross);
      if (n1 * n2 - c2 <= 1e-20 * n1 * n2) continue;  // collinear cell
      const double s1 = s.rho * (n1 - c2 / n2);
      const double s2 = s.rho * (n2 - c2 / n1);
      const double cell_min = std::min(s1, s2);
      if (!found || cell_min > best_min) {
        best_min = cell_min;
        best_i = i;
        best_j = j;
        found = true;
      }
    }
  }
  if (!found) throw SearchError("every grid cell has collinear channels");

  SearchResult res;
  res.index1 = best_i;
  res.index2 = best_j;
  res.antennas = {s.waveguides[0].point_at(grid1[best_i]),
                  s.waveguides[1].point_at(grid2[best_j])};
  s.antennas = res.antennas;
  const ChannelMatrix h = channel_matrix(s);
  res.beamformers = zf_beamformer(h);
  res.sinrs = sinr(h, res.beamformers, s.rho);
  return res;
}

// Uniform grid of x-positions centred at `center_x`, clamped to the span.
inline std::vector<double> search_grid(const Waveguide& wg, double center_x,
                                       double half_width, double step) {
  std::vector<double> g;
  const long long n = static_cast<long long>(std::floor(half_width / step + 1e-9));
  for (long long i = -n; i <= n; ++i) {
    const double x = center_x + static_cast<double>(i) * step;
    if (x >= wg.x_min_m && x <= wg.x_max_m) g.push_back(x);
  }
  if (g.empty()) g.push_back(std::clamp(center_x, wg.x_min_m, wg.x_max_m));
  return g;
}

inline std::vector<double> full_span_grid(const Waveguide& wg, double step) {
  std::vector<double> g;
  const long long n = static_cast<long long>(std::floor((wg.x_max_m - wg.x_min_m) / step));
  g.reserve(static_cast<std::size_t>(n) + 1);
  for (long long i = 0; i <= n; ++i) g.push_back(wg.x_min_m + static_cast<double>(i) * step);
  return g;
}

}  // namespace pinchsim
