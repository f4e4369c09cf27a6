#pragma once

// Power-domain NOMA over one waveguide with one pinching antenna per user:
// superposition coding at the feed, SIC at the receivers, plus the high-SNR
// closed forms for the two-user deployment with far-apart areas.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "pinchsim/errors.hpp"
#include "pinchsim/single_antenna.hpp"
#include "pinchsim/waveguide_array.hpp"

namespace pinchsim {

struct NomaAllocation {
  std::vector<double> alphas;

  void validate() const {
    if (alphas.empty()) throw ParameterError("allocation must be nonempty");
    double sum = 0.0;
    for (double a : alphas) {
      if (!(a >= 0.0)) throw ParameterError("allocation coefficients must be nonnegative");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("allocation must sum to 1");
  }
};

// Descending odd-weight coefficients: user m gets weight 2(M-m)+1, so the
// weights sum to M^2 and the weakest user receives the largest share.
inline NomaAllocation build_noma_coefficients(int num_users) {
  if (num_users < 1) throw ParameterError("need at least one user");
  NomaAllocation alloc;
  alloc.alphas.resize(num_users);
  const double m2 = static_cast<double>(num_users) * num_users;
  for (int m = 1; m <= num_users; ++m)
    alloc.alphas[m - 1] = (2.0 * (num_users - m) + 1.0) / m2;
  return alloc;
}

struct NomaResult {
  std::vector<double> rates;                // indexed weakest (0) to strongest (M-1)
  std::vector<std::size_t> order;           // order[i] = input index of the i-th weakest
  std::vector<std::complex<double>> channels;  // effective channels, same ordering
};

// SIC rate computation from effective channels. `per_antenna_power_w` is the
// power radiated per antenna (P/M on a shared waveguide, P for a single
// conventional antenna). Users are relabelled by |h|^2 ascending before
// decoding; rate m is the minimum over the decoders that must recover it.
inline NomaResult noma_rates_from_channels(const std::vector<std::complex<double>>& channels,
                                           const NomaAllocation& alloc,
                                           double per_antenna_power_w, double noise_w) {
  alloc.validate();
  const std::size_t m_users = channels.size();
  if (alloc.alphas.size() != m_users)
    throw ParameterError("allocation length must match the number of users");

  NomaResult res;
  res.order.resize(m_users);
  std::iota(res.order.begin(), res.order.end(), std::size_t{0});
  std::sort(res.order.begin(), res.order.end(), [&](std::size_t a, std::size_t b) {
    return std::norm(channels[a]) < std::norm(channels[b]);
  });
  res.channels.reserve(m_users);
  for (std::size_t i : res.order) res.channels.push_back(channels[i]);

  std::vector<double> snr(m_users);
  for (std::size_t i = 0; i < m_users; ++i)
    snr[i] = std::norm(res.channels[i]) * per_antenna_power_w / noise_w;

  res.rates.resize(m_users);
  for (std::size_t m = 0; m < m_users; ++m) {
    double residual = 0.0;
    for (std::size_t j = m + 1; j < m_users; ++j) residual += alloc.alphas[j];
    double rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = m; i < m_users; ++i) {
      const double sinr = snr[i] * alloc.alphas[m] / (snr[i] * residual + 1.0);
      rate = std::min(rate, std::log2(1.0 + sinr));
    }
    res.rates[m] = rate;
  }
  return res;
}

// NOMA with each antenna pinched at the waveguide point closest to its user.
inline NomaResult noma_rates(const std::vector<Point3>& users, const NomaAllocation& alloc,
                             double power_w, const Waveguide& wg,
                             const DerivedConstants& c) {
  if (users.empty()) throw ParameterError("need at least one user");
  std::vector<Point3> antennas;
  antennas.reserve(users.size());
  for (const auto& u : users) antennas.push_back(wg.closest_point(u));
  {
    std::vector<double> xs;
    for (const auto& a : antennas) xs.push_back(a.x);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (xs[i] - xs[i - 1] < c.guard_m - 1e-12)
        throw GeometryError("pinched antennas closer than the guard distance");
  }
  const AntennaArray array{antennas, wg};
  std::vector<std::complex<double>> channels;
  channels.reserve(users.size());
  for (const auto& u : users) channels.push_back(effective_channel(u, array, c));
  const double per_antenna = power_w / static_cast<double>(users.size());
  return noma_rates_from_channels(channels, alloc, per_antenna, c.noise_w);
}

// High-SNR closed form of the two-user NOMA ergodic sum rate when the weak
// user's area is far away: a constant weak-user term plus the strong user's
// ergodic rate at its share of the power.
inline double noma_ergodic_sum_highsnr(double D, double d, double power_w, int num_antennas,
                                       double alpha2, const DerivedConstants& c) {
  if (!(alpha2 > 0.0) || !(alpha2 < 1.0))
    throw ParameterError("alpha2 must lie strictly inside (0, 1)");
  if (!(D > 0.0) || !(d > 0.0)) throw ParameterError("D and d must be positive");
  const double g = c.eta_m2 * power_w * alpha2 / (num_antennas * c.noise_w);
  const double q = 0.25 * D * D;
  return -std::log2(alpha2) + std::log2(q + d * d + g) + 2.0 * kLog2E -
         std::log2(q + d * d) - (4.0 / D) * kLog2E * d * std::atan(0.5 * D / d);
}

// High-SNR instantaneous gap between the NOMA sum rate and the OMA sum rate
// for two users and two antennas, with the OMA slots run at twice the power.
inline double noma_oma_gap_highsnr(double dist1, double dist2) {
  if (!(dist1 > 0.0) || !(dist2 > 0.0)) throw ParameterError("distances must be positive");
  return std::log2(dist1 / dist2) - 3.0;
}

}  // namespace pinchsim
