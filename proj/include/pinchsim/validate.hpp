#pragma once

// Self-check suite behind the `validate` subcommand: every closed form is
// re-derived by an independent numerical route (adaptive quadrature, brute
// force re-summation, Monte Carlo) and compared at a fixed tolerance.

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <vector>

#include "pinchsim/config.hpp"
#include "pinchsim/csv.hpp"
#include "pinchsim/harness.hpp"
#include "pinchsim/miso.hpp"
#include "pinchsim/quadrature.hpp"
#include "pinchsim/rng.hpp"
#include "pinchsim/single_antenna.hpp"
#include "pinchsim/waveguide_array.hpp"

namespace pinchsim {

struct ValidationCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline void push_check(ValidationReport& rep, const std::string& name, double residual,
                       double tolerance, std::string note = "") {
  rep.checks.push_back({name, residual, tolerance, residual <= tolerance, std::move(note)});
}

inline double log_uniform(SplitMix64& rng, double lo, double hi) {
  return lo * std::exp(rng.uniform01() * std::log(hi / lo));
}

}  // namespace detail

inline ValidationReport run_validation(const FigureConfig& cfg) {
  ValidationReport rep;
  const DerivedConstants consts = derive_constants(cfg.physical);

  // test-only fault-injection hook: scales the SNR constant used by the
  // closed-form route of the Monte Carlo cross-check
  double eta_scale = 1.0;
  if (const char* env = std::getenv("PINCHSIM_DEBUG_ETA_SCALE")) {
    const double v = std::atof(env);
    if (v > 0.0) eta_scale = v;
  }

  {  // g closed form vs adaptive quadrature
    SplitMix64 rng = trial_stream(cfg.seed, 101);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const double a = detail::log_uniform(rng, 1e-4, 1e8);
      const double D = detail::log_uniform(rng, 0.5, 50.0);
      const double quad =
          adaptive_simpson([a](double y) { return std::log2(y * y + a); }, 0.0, D / 2.0);
      worst = std::max(worst, std::abs(g_closed(a, D) - quad));
    }
    detail::push_check(rep, "g-quadrature", worst, 1e-9);
  }

  {  // g2 closed form vs adaptive quadrature
    SplitMix64 rng = trial_stream(cfg.seed, 102);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const double a = detail::log_uniform(rng, 1e-4, 1e8);
      const double D = detail::log_uniform(rng, 0.5, 50.0);
      const double quad =
          adaptive_simpson([a](double z) { return std::log(z + a); }, 0.0, D * D / 4.0);
      worst = std::max(worst, std::abs(g2_closed(a, D) - quad));
    }
    detail::push_check(rep, "g2-quadrature", worst, 1e-9);
  }

  {  // closed-form ergodic rate equals its two-evaluation route exactly
    SplitMix64 rng = trial_stream(cfg.seed, 103);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      PhysicalParams p = cfg.physical;
      p.waveguide_height_m = 1.0 + 9.0 * rng.uniform01();
      const double D = 1.0 + 49.0 * rng.uniform01();
      const SnrOperatingPoint op{50.0 * rng.uniform01(), p, 1, D};
      const DerivedConstants c = derive_constants(p);
      const double d2 = p.waveguide_height_m * p.waveguide_height_m;
      const double direct = ergodic_sum_rate_pinching(op);
      const double via_g =
          (2.0 / D) * (g_closed(d2 + op.gamma(c), D) - g_closed(d2, D));
      worst = std::max(worst, std::abs(direct - via_g) / std::abs(direct));
    }
    detail::push_check(rep, "ergodic-rate-identity", worst, 1e-12);
  }

  {  // closed form vs seeded Monte Carlo (the eta hook perturbs this route)
    SnrOperatingPoint op{30.0, cfg.physical, 1, 10.0};
    op.transmit_power_dbm += 10.0 * std::log10(eta_scale);
    const double closed = ergodic_sum_rate_pinching(op);

    TrialPlan plan;
    plan.seed = cfg.seed;
    plan.num_trials = cfg.mc_trials;
    plan.deployment = Deployment::square({0.0, 0.0, 0.0}, 10.0);
    plan.scheme = Scheme::kPinching1;
    plan.sweep_dbm = {30.0};
    plan.params = cfg.physical;
    plan.workers = cfg.workers;
    const SweepResult r = run_sweep(plan);
    const MeanVarAcc& acc = r.columns[0].per_power[0];
    const double diff = std::abs(closed - acc.mean);
    const double tol = std::min(3.0 * acc.stderr_of_mean(), 0.005 * std::abs(closed));
    detail::push_check(rep, "ergodic-rate-montecarlo", diff, tol,
                       "closed=" + fmt_double(closed) + " mc=" + fmt_double(acc.mean));
  }

  {  // high-SNR gap between the two systems reduces to g3(D/(2d))
    SplitMix64 rng = trial_stream(cfg.seed, 104);
    double worst = 0.0;
    double min_gap = 0.0;
    for (int i = 0; i < 300; ++i) {
      PhysicalParams p = cfg.physical;
      p.waveguide_height_m = 0.5 + 9.5 * rng.uniform01();
      const double D = 1.0 + 49.0 * rng.uniform01();
      const SnrOperatingPoint op{50.0, p, 1, D};
      const double gap = ergodic_sum_rate_pinching_highsnr(op) -
                         ergodic_sum_rate_conventional_bound_highsnr(op);
      const double closed = rate_gap_highsnr(D, p.waveguide_height_m);
      worst = std::max(worst, std::abs(gap - closed));
      min_gap = std::min(min_gap, closed);
    }
    detail::push_check(rep, "highsnr-gap-identity", worst, 1e-10,
                       "min gap=" + fmt_double(min_gap));
  }

  {  // monotonicity chain on a dense grid
    double min_fd3 = 0.0, min_g4 = 0.0, min_fd5 = 0.0;
    double prev3 = g3(1e-3), prev5 = g5(1e-3);
    for (int i = 1; i <= 1000; ++i) {
      const double x = 0.1 * i;
      min_fd3 = std::min(min_fd3, g3(x) - prev3);
      min_fd5 = std::min(min_fd5, g5(x) - prev5);
      min_g4 = std::min(min_g4, g4(x));
      prev3 = g3(x);
      prev5 = g5(x);
    }
    const double worst = -std::min({min_fd3, min_g4, min_fd5});
    detail::push_check(rep, "g3-g4-g5-monotone", worst, 1e-12);
  }

  {  // effective channel vs independent term-by-term re-summation
    SplitMix64 rng = trial_stream(cfg.seed, 105);
    double worst = 0.0;
    const Waveguide wg = make_waveguide(0.0, cfg.physical.waveguide_height_m, -20.0, 20.0);
    for (int i = 0; i < 200; ++i) {
      const Point3 user{40.0 * rng.uniform01() - 20.0, 10.0 * rng.uniform01() - 5.0, 0.0};
      std::vector<Point3> pos;
      double x = -15.0 + 5.0 * rng.uniform01();
      for (int n = 0; n < 4; ++n) {
        pos.push_back(wg.point_at(x));
        x += consts.guard_m * (1.0 + 5.0 * rng.uniform01());
      }
      const AntennaArray arr{pos, wg};
      const Complex fast = effective_channel(user, arr, consts);
      double re = 0.0, im = 0.0, amp_scale = 0.0;
      for (int n = 3; n >= 0; --n) {  // reversed order, explicit trig
        const double r = distance(user, arr.positions[n]);
        const double phase =
            kTwoPi * (std::fmod(r / consts.lambda_m, 1.0) +
                      std::fmod(distance(wg.feed_point, arr.positions[n]) /
                                    consts.guided_lambda_m,
                                1.0));
        const double amp = std::sqrt(consts.eta_m2) / r;
        re += amp * std::cos(phase);
        im -= amp * std::sin(phase);
        amp_scale += amp;
      }
      worst = std::max(worst, std::abs(fast - Complex{re, im}) / amp_scale);
    }
    detail::push_check(rep, "channel-resummation", worst, 1e-14);
  }

  {  // the placement search closes the gap to the aligned-phase bound
    SplitMix64 rng = trial_stream(cfg.seed, 106);
    const Waveguide wg = make_waveguide(0.0, cfg.physical.waveguide_height_m, -6.0, 6.0);
    const double power = dbm_to_watts(30.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Point3 user{10.0 * rng.uniform01() - 5.0, 10.0 * rng.uniform01() - 5.0, 0.0};
      const AntennaArray arr = place_antennas_oma(user, 4, wg, consts);
      const double rate = rate_oma_array(user, arr, power, 1, consts);
      const double bound = rate_oma_bound(user, arr, power, 1, consts).at_positions;
      worst = std::max(worst, std::abs(bound - rate));
    }
    detail::push_check(rep, "placement-bound-gap", worst, 1e-6);
  }

  {  // beamformer SINRs never exceed the single-user bound; ZF nulls cross
     // terms; the geometric phase-matched construction coincides with MRC
    SplitMix64 rng = trial_stream(cfg.seed, 107);
    double worst_dominance = 0.0, worst_cross = 0.0, worst_pm = 0.0;
    const double side = 20.0;
    const Deployment square = Deployment::square({0.0, 0.0, 0.0}, side);
    for (int i = 0; i < 2000; ++i) {
      MisoScenario s;
      s.users = {sample_user(square, 0, rng), sample_user(square, 0, rng)};
      s.waveguides = {
          make_waveguide(side / 3.0, cfg.physical.waveguide_height_m, -10.0, 10.0),
          make_waveguide(-side / 3.0, cfg.physical.waveguide_height_m, -10.0, 10.0)};
      s.antennas = {s.waveguides[0].closest_point(s.users[0]),
                    s.waveguides[1].closest_point(s.users[1])};
      s.rho = detail::log_uniform(rng, 1e8, 1e13);
      s.params = cfg.physical;
      const ChannelMatrix h = channel_matrix(s);
      const auto bound = sinr_upper_bound(h, s.rho);

      const BeamformingMatrix mrc = mrc_beamformer(h);
      const BeamformingMatrix zf = zf_beamformer(h);
      const BeamformingMatrix pm = phase_matched_beamformer(s);
      for (const auto& p : {mrc, zf, pm}) {
        const auto sv = sinr(h, p, s.rho);
        for (int m = 0; m < 2; ++m)
          worst_dominance = std::max(worst_dominance, (sv[m] - bound[m]) / bound[m]);
      }
      for (int m = 0; m < 2; ++m) {
        worst_cross = std::max(worst_cross,
                               std::abs(hdot(h.rows[m], zf.columns[1 - m])) /
                                   std::sqrt(norm2(h.rows[m])));
        worst_pm = std::max(worst_pm,
                            std::abs(std::abs(hdot(pm.columns[m], mrc.columns[m])) - 1.0));
      }
    }
    detail::push_check(rep, "miso-bound-dominance", worst_dominance, 1e-12);
    detail::push_check(rep, "zf-cross-terms", worst_cross, 1e-12);
    detail::push_check(rep, "phase-matched-vs-mrc", worst_pm, 1e-12);
  }

  {  // symmetric feasibility construction reaches the bound
    const double side = 20.0;
    const double d = cfg.physical.waveguide_height_m;
    const auto sp = symmetric_feasible_placement(-5.0, 5.0, side, d, cfg.physical);
    MisoScenario s;
    s.users = {Point3{-5.0, 0.0, 0.0}, Point3{5.0, 0.0, 0.0}};
    s.waveguides = {make_waveguide(side / 3.0, d, -10.0, 10.0),
                    make_waveguide(-side / 3.0, d, -10.0, 10.0)};
    s.antennas = sp.antennas;
    s.rho = dbm_to_watts(30.0) / consts.noise_w;
    s.params = cfg.physical;
    const auto res = orthogonality_residual(s);
    detail::push_check(rep, "symmetric-constraint-1", res.constraint1, 1e-10);
    detail::push_check(rep, "symmetric-constraint-2", res.constraint2, 1e-10);

    const ChannelMatrix h = channel_matrix(s);
    const auto bound = sinr_upper_bound(h, s.rho);
    const auto zf = sinr(h, zf_beamformer(h), s.rho);
    const double gap =
        std::max(std::log2(1.0 + bound[0]) - std::log2(1.0 + zf[0]),
                 std::log2(1.0 + bound[1]) - std::log2(1.0 + zf[1]));
    detail::push_check(rep, "symmetric-bound-gap", gap, 1e-3);
  }

  return rep;
}

}  // namespace pinchsim
