// Acceptance suite: end-to-end checks of the toolkit against its numerical
// contracts, one pass/fail line per criterion. Exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "pinchsim/config.hpp"
#include "pinchsim/csv.hpp"
#include "pinchsim/figures.hpp"
#include "pinchsim/harness.hpp"
#include "pinchsim/miso.hpp"
#include "pinchsim/noma.hpp"
#include "pinchsim/quadrature.hpp"
#include "pinchsim/single_antenna.hpp"

using namespace pinchsim;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

const PhysicalParams kParams{};
const DerivedConstants kConsts = derive_constants(kParams);

// --- 1: closed-form ergodic rate vs 1e6-trial Monte Carlo, single-threaded --
void criterion1() {
  const SnrOperatingPoint op{30.0, kParams, 1, 10.0};
  const double closed = ergodic_sum_rate_pinching(op);

  TrialPlan plan;
  plan.seed = 1;
  plan.num_trials = 1000000;
  plan.deployment = Deployment::square({0, 0, 0}, 10.0);
  plan.scheme = Scheme::kPinching1;
  plan.sweep_dbm = {30.0};
  plan.params = kParams;
  plan.workers = 1;

  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult r = run_sweep(plan);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const MeanVarAcc& acc = r.columns[0].per_power[0];
  const double diff = std::abs(acc.mean - closed);
  const bool pass = diff <= 3.0 * acc.stderr_of_mean() && diff <= 0.005 * closed &&
                    seconds < 10.0;
  report(1, pass, "closed-form ergodic rate matches 1e6-trial Monte Carlo",
         "closed=" + fmt_double(closed) + " mc=" + fmt_double(acc.mean) + " diff=" +
             fmt_double(diff) + " 3se=" + fmt_double(3.0 * acc.stderr_of_mean()) +
             " runtime=" + fmt_double(seconds) + "s");
}

// --- 2: g-family closed forms vs quadrature; monotonicity chain ------------
void criterion2() {
  SplitMix64 rng{202};
  double worst_g = 0.0, worst_g2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = 1e-4 * std::exp(rng.uniform01() * std::log(1e12));
    const double D = 0.5 * std::exp(rng.uniform01() * std::log(100.0));
    const double gq =
        adaptive_simpson([a](double y) { return std::log2(y * y + a); }, 0.0, D / 2.0);
    worst_g = std::max(worst_g, std::abs(g_closed(a, D) - gq));
    const double g2q =
        adaptive_simpson([a](double z) { return std::log(z + a); }, 0.0, D * D / 4.0);
    worst_g2 = std::max(worst_g2, std::abs(g2_closed(a, D) - g2q));
  }

  bool chain_ok = true;
  double prev3 = g3(0.0), prev5 = g5(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double x = 0.1 * i;  // grid over (0, 100]
    chain_ok = chain_ok && g3(x) >= prev3 - 1e-12 && g5(x) >= prev5 - 1e-12 &&
               g4(x) >= -1e-12;
    prev3 = g3(x);
    prev5 = g5(x);
  }

  const bool pass = worst_g <= 1e-9 && worst_g2 <= 1e-9 && chain_ok;
  report(2, pass, "g-family closed forms match quadrature; monotonicity chain holds",
         "max|g-quad|=" + fmt_double(worst_g) + " max|g2-quad|=" + fmt_double(worst_g2) +
             " chain=" + (chain_ok ? "ok" : "violated"));
}

// --- 3: high-SNR gap identity, nonnegativity, monotonicity -----------------
void criterion3() {
  SplitMix64 rng{303};
  double worst_identity = 0.0;
  double min_gap = 1e300;
  for (int i = 0; i < 500; ++i) {
    PhysicalParams p = kParams;
    p.waveguide_height_m = 0.5 + 9.5 * rng.uniform01();
    const double D = 1.0 + 49.0 * rng.uniform01();
    const SnrOperatingPoint op{50.0, p, 1, D};
    const double gap = ergodic_sum_rate_pinching_highsnr(op) -
                       ergodic_sum_rate_conventional_bound_highsnr(op);
    worst_identity =
        std::max(worst_identity, std::abs(gap - rate_gap_highsnr(D, p.waveguide_height_m)));
    min_gap = std::min(min_gap, gap);
  }

  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double ratio = 0.1 * std::pow(1000.0, i / 1000.0);  // D/d over [0.1, 100]
    const double gap = rate_gap_highsnr(ratio, 1.0);
    monotone = monotone && gap >= prev - 1e-12;
    prev = gap;
  }

  const bool pass = worst_identity <= 1e-10 && min_gap >= 0.0 && monotone;
  report(3, pass, "high-SNR rate gap equals g3(D/2d), nonnegative and nondecreasing",
         "max|identity|=" + fmt_double(worst_identity) + " min_gap=" + fmt_double(min_gap) +
             " monotone=" + (monotone ? "ok" : "violated"));
}

// --- 4: placement search achieves the bound; N-scaling of the array gain ---
void criterion4() {
  SplitMix64 rng{404};
  const Waveguide wg = make_waveguide(0.0, 3.0, -6.0, 6.0);
  const double power = dbm_to_watts(30.0);
  double worst_bound_gap = 0.0, worst_clustered_rel = 0.0;
  for (int n : {1, 2, 4, 8}) {
    for (int i = 0; i < 100; ++i) {
      const Point3 user{10.0 * rng.uniform01() - 5.0, 10.0 * rng.uniform01() - 5.0, 0.0};
      const AntennaArray arr = place_antennas_oma(user, n, wg, kConsts);
      const double rate = rate_oma_array(user, arr, power, 1, kConsts);
      const OmaBound bound = rate_oma_bound(user, arr, power, 1, kConsts);
      worst_bound_gap = std::max(worst_bound_gap, std::abs(bound.at_positions - rate));
      worst_clustered_rel = std::max(
          worst_clustered_rel, std::abs(rate - bound.clustered) / bound.clustered);
    }
  }

  auto ergodic_array_rate = [&](int n) {
    TrialPlan plan;
    plan.seed = 4;
    plan.num_trials = 100000;
    plan.deployment = Deployment::square({0, 0, 0}, 10.0);
    plan.scheme = Scheme::kPinchingArrayOma;
    plan.antenna_count = n;
    plan.sweep_dbm = {50.0};
    plan.params = kParams;
    return run_sweep(plan).columns[0].per_power[0].mean;
  };
  const double gain = ergodic_array_rate(8) - ergodic_array_rate(1);

  const bool pass =
      worst_bound_gap <= 1e-6 && worst_clustered_rel <= 0.01 && std::abs(gain - 3.0) <= 0.1;
  report(4, pass, "array placement reaches its bound; eight antennas buy three bits",
         "max_bound_gap=" + fmt_double(worst_bound_gap) + " max_clustered_rel=" +
             fmt_double(worst_clustered_rel) + " gain(N=1->8)=" + fmt_double(gain));
}

// --- 5: NOMA closed form vs exact simulation; gap formula; weak ceiling ----
void criterion5() {
  const NomaAllocation alloc = build_noma_coefficients(2);
  const Deployment areas = Deployment::noma_pair({20, 20, 0}, {-10, 0, 0}, 2.0);

  double worst_lemma = 0.0;
  for (double dbm : {45.0, 50.0}) {
    TrialPlan plan;
    plan.seed = 5;
    plan.num_trials = 100000;
    plan.deployment = areas;
    plan.scheme = Scheme::kNoma;
    plan.num_users = 2;
    plan.antenna_count = 2;
    plan.sweep_dbm = {dbm};
    plan.params = kParams;
    const SweepResult r = run_sweep(plan);
    const double mc_sum = r.columns[2].per_power[0].mean;
    const double closed = noma_ergodic_sum_highsnr(2.0, 3.0, dbm_to_watts(dbm), 2,
                                                   alloc.alphas[1], kConsts);
    worst_lemma = std::max(worst_lemma, std::abs(mc_sum - closed));
  }

  // Per-realization NOMA-minus-OMA gap against its closed form at 50 dBm,
  // inside the far-apart model the formula is derived in (one dominant path
  // per user). The full phasor-sum simulation is compared in the mean below:
  // its residual cross-phasor swings the per-realization strong-user rate by
  // up to +-0.32 bit but averages out over the uniform deployment.
  const Waveguide wg = make_waveguide(0.0, 3.0, -12.0, 22.0);
  const double power = dbm_to_watts(50.0);
  double worst_gap = 0.0;
  for (int i = 0; i < 2000; ++i) {
    SplitMix64 rng = trial_stream(505, i);
    const Point3 weak = sample_user(areas, 0, rng);
    const Point3 strong = sample_user(areas, 1, rng);
    const double dist1 = distance(weak, wg.closest_point(weak));
    const double dist2 = distance(strong, wg.closest_point(strong));
    const double s1 = kConsts.eta_m2 / (dist1 * dist1) * (power / 2.0) / kConsts.noise_w;
    const double s2 = kConsts.eta_m2 / (dist2 * dist2) * (power / 2.0) / kConsts.noise_w;
    const double noma_sum =
        std::log2(1.0 + s1 * alloc.alphas[0] / (s1 * alloc.alphas[1] + 1.0)) +
        std::log2(1.0 + s2 * alloc.alphas[1]);
    double oma_sum = 0.0;
    for (double dist : {dist1, dist2})
      oma_sum += 0.5 * std::log2(1.0 + 2.0 * (2.0 * power) * kConsts.eta_m2 /
                                           (kConsts.noise_w * dist * dist));
    const double sim_gap = noma_sum - oma_sum;
    worst_gap = std::max(worst_gap, std::abs(sim_gap - noma_oma_gap_highsnr(dist1, dist2)));
  }

  // full phasor-sum cross-check in the ergodic mean
  double mean_gap_err = 0.0;
  {
    TrialPlan gap_plan;
    gap_plan.seed = 506;
    gap_plan.num_trials = 50000;
    gap_plan.deployment = areas;
    gap_plan.scheme = Scheme::kNoma;
    gap_plan.num_users = 2;
    gap_plan.antenna_count = 2;
    gap_plan.noma_emit_oma_gap = true;
    gap_plan.sweep_dbm = {50.0};
    gap_plan.params = kParams;
    const SweepResult r = run_sweep(gap_plan);
    mean_gap_err = std::abs(r.columns[3].per_power[0].mean - r.columns[4].per_power[0].mean);
  }

  // weak-user ceiling at 60 dBm
  TrialPlan plan;
  plan.seed = 55;
  plan.num_trials = 100000;
  plan.deployment = areas;
  plan.scheme = Scheme::kNoma;
  plan.num_users = 2;
  plan.antenna_count = 2;
  plan.sweep_dbm = {60.0};
  plan.params = kParams;
  const double weak_rate = run_sweep(plan).columns[0].per_power[0].mean;
  const double ceiling = std::log2(1.0 + alloc.alphas[0] / alloc.alphas[1]);

  const bool pass = worst_lemma <= 0.3 && worst_gap <= 0.3 && mean_gap_err <= 0.3 &&
                    std::abs(weak_rate - ceiling) <= 0.05;
  report(5, pass, "NOMA closed forms track the exact-formula simulation",
         "max|lemma-mc|=" + fmt_double(worst_lemma) + " max|gap-formula|=" +
             fmt_double(worst_gap) + " mean_gap_err=" + fmt_double(mean_gap_err) +
             " weak_rate=" + fmt_double(weak_rate) + " ceiling=" + fmt_double(ceiling));
}

// --- 6: bound dominance for every beamformer over 1e4 random instances -----
void criterion6() {
  const double side = 20.0;
  const Deployment square = Deployment::square({0, 0, 0}, side);
  double worst_dom = -1e300, worst_cross = 0.0, worst_pm = 0.0;
  for (int i = 0; i < 10000; ++i) {
    SplitMix64 rng = trial_stream(606, i);
    MisoScenario s;
    s.users = {sample_user(square, 0, rng), sample_user(square, 0, rng)};
    s.waveguides = {make_waveguide(side / 3.0, 3.0, -10.0, 10.0),
                    make_waveguide(-side / 3.0, 3.0, -10.0, 10.0)};
    s.antennas = {s.waveguides[0].closest_point(s.users[0]),
                  s.waveguides[1].closest_point(s.users[1])};
    s.rho = 1e8 * std::exp(rng.uniform01() * std::log(1e5));
    s.params = kParams;
    const ChannelMatrix h = channel_matrix(s);
    const auto bound = sinr_upper_bound(h, s.rho);

    const BeamformingMatrix mrc = mrc_beamformer(h);
    const BeamformingMatrix zf = zf_beamformer(h);
    const BeamformingMatrix pm = phase_matched_beamformer(s);
    for (const auto& p : {mrc, zf, pm}) {
      const auto out = sinr(h, p, s.rho);
      for (int m = 0; m < 2; ++m)
        worst_dom = std::max(worst_dom, (out[m] - bound[m]) / bound[m]);
    }
    for (int m = 0; m < 2; ++m) {
      worst_cross = std::max(worst_cross, std::abs(hdot(h.rows[m], zf.columns[1 - m])) /
                                              std::sqrt(norm2(h.rows[m])));
      worst_pm = std::max(
          worst_pm, std::abs(std::abs(hdot(pm.columns[m], mrc.columns[m])) - 1.0));
    }

    if (i % 20 == 0) {  // the search output obeys the bound at its own cell
      const auto g1 = search_grid(s.waveguides[0], s.antennas[0].x,
                                  2.0 * kConsts.lambda_m, 0.5 * kConsts.lambda_m);
      const auto g2 = search_grid(s.waveguides[1], s.antennas[1].x,
                                  2.0 * kConsts.lambda_m, 0.5 * kConsts.lambda_m);
      const SearchResult sr = algorithm1_search(s, g1, g2);
      MisoScenario at = s;
      at.antennas = sr.antennas;
      const auto b = sinr_upper_bound(channel_matrix(at), s.rho);
      for (int m = 0; m < 2; ++m)
        worst_dom = std::max(worst_dom, (sr.sinrs[m] - b[m]) / b[m]);
    }
  }
  const bool pass = worst_dom <= 1e-12 && worst_cross <= 1e-12 && worst_pm <= 1e-12;
  report(6, pass, "all beamformers stay below the single-user SINR bound",
         "worst_excess=" + fmt_double(worst_dom) + " worst_zf_cross=" +
             fmt_double(worst_cross) + " worst_pm_mrc=" + fmt_double(worst_pm));
}

// --- 7: constructive symmetric placement achieves the bound ----------------
void criterion7() {
  const double side = 20.0;
  const auto sp = symmetric_feasible_placement(-5.0, 5.0, side, 3.0, kParams);
  MisoScenario s;
  s.users = {Point3{-5.0, 0.0, 0.0}, Point3{5.0, 0.0, 0.0}};
  s.waveguides = {make_waveguide(side / 3.0, 3.0, -10.0, 10.0),
                  make_waveguide(-side / 3.0, 3.0, -10.0, 10.0)};
  s.antennas = sp.antennas;
  s.rho = dbm_to_watts(30.0) / kConsts.noise_w;
  s.params = kParams;

  const auto res = orthogonality_residual(s);
  const ChannelMatrix h = channel_matrix(s);
  const auto bound = sinr_upper_bound(h, s.rho);
  const BeamformingMatrix zf = zf_beamformer(h);
  const auto out = sinr(h, zf, s.rho);
  const double min_rate_gap =
      std::min(std::log2(1.0 + bound[0]), std::log2(1.0 + bound[1])) -
      std::min(std::log2(1.0 + out[0]), std::log2(1.0 + out[1]));

  double worst_leak_db = -1e300;
  const BeamformingMatrix pm = phase_matched_beamformer(s);
  for (const auto& p : {zf, pm}) {
    for (int m = 0; m < 2; ++m) {
      const double sig = std::norm(hdot(h.rows[m], p.columns[m]));
      const double leak = std::norm(hdot(h.rows[m], p.columns[1 - m]));
      worst_leak_db = std::max(worst_leak_db, 10.0 * std::log10(leak / sig));
    }
  }

  const bool pass = std::abs(min_rate_gap) <= 1e-3 && worst_leak_db <= -100.0 &&
                    res.constraint1 <= 1e-10 && res.constraint2 <= 1e-10;
  report(7, pass, "mirrored micro-placement makes the bound achievable",
         "min_rate_gap=" + fmt_double(min_rate_gap) + " leak_db=" +
             fmt_double(worst_leak_db) + " c1=" + fmt_double(res.constraint1) + " c2=" +
             fmt_double(res.constraint2) + " k=" + std::to_string(sp.k));
}

// --- 8: beamformer ordering and the two achievability regimes --------------
void criterion8() {
  const FigureConfig cfg = resolve_config("table1", Json{{"realizations", 100}});
  const Table1Result res = run_table1(cfg);

  bool saw_achieved = false, saw_missed = false;
  // rows arrive as [MRC, ZF, Bound, Proposed] per realization
  for (std::size_t i = 0; i + 3 < res.doc.rows.size(); i += 4) {
    const double bound = std::stod(res.doc.rows[i + 2][4]);
    const double proposed = std::stod(res.doc.rows[i + 3][4]);
    const double gap = bound - proposed;
    if (gap < 1e-2) saw_achieved = true;
    if (gap > 0.3) saw_missed = true;
  }
  const bool pass = res.ordering_violations == 0 && saw_achieved && saw_missed;
  report(8, pass, "min-rate ordering holds; bound is hit sometimes and missed sometimes",
         "violations=" + std::to_string(res.ordering_violations) + " achieved=" +
             (saw_achieved ? "yes" : "no") + " missed=" + (saw_missed ? "yes" : "no"));
}

// --- 9: worker count cannot change the emitted CSV body --------------------
void criterion9() {
  bool pass = true;
  std::string detail;

  const FigureConfig f4 = resolve_config(
      "fig4", Json{{"trials", 2000}, {"sides_m", {10.0}}, {"sweep_dbm", {20.0, 40.0}}});
  const FigureConfig f9 = resolve_config(
      "fig9", Json{{"trials", 40}, {"sweep_dbm", {20.0, 40.0}}});

  setenv("PINCHSIM_WORKERS", "1", 1);
  const std::string f4_one = run_fig4(f4).body();
  const std::string f9_one = run_fig9(f9).body();
  setenv("PINCHSIM_WORKERS", "8", 1);
  const std::string f4_many = run_fig4(f4).body();
  const std::string f9_many = run_fig9(f9).body();
  unsetenv("PINCHSIM_WORKERS");

  if (f4_one != f4_many) {
    pass = false;
    detail += "fig4 bodies differ; ";
  }
  if (f9_one != f9_many) {
    pass = false;
    detail += "fig9 bodies differ; ";
  }
  if (pass) detail = "fig4 and fig9 bodies byte-identical across 1 and 8 workers";
  report(9, pass, "Monte Carlo output is independent of the worker count", detail);
}

// --- 10: feed-point invariance --------------------------------------------
void criterion10() {
  double worst_oma = 0.0;
  const double power = dbm_to_watts(30.0);
  for (int i = 0; i < 50; ++i) {
    SplitMix64 rng = trial_stream(1010, i);
    const Point3 user{10.0 * rng.uniform01() - 5.0, 10.0 * rng.uniform01() - 5.0, 0.0};
    Waveguide wg = make_waveguide(0.0, 3.0, -6.0, 6.0);
    wg.feed_point = wg.point_at(-6.0 + 12.0 * rng.uniform01());
    const AntennaArray arr = place_antennas_oma(user, 4, wg, kConsts);
    const double rate = rate_oma_array(user, arr, power, 1, kConsts);
    const double bound = rate_oma_bound(user, arr, power, 1, kConsts).at_positions;
    worst_oma = std::max(worst_oma, std::abs(bound - rate));
  }

  double worst_miso = 0.0;
  const double side = 20.0;
  const Deployment square = Deployment::square({0, 0, 0}, side);
  for (int i = 0; i < 100; ++i) {
    SplitMix64 rng = trial_stream(1011, i);
    MisoScenario s;
    s.users = {sample_user(square, 0, rng), sample_user(square, 0, rng)};
    s.waveguides = {make_waveguide(side / 3.0, 3.0, -10.0, 10.0),
                    make_waveguide(-side / 3.0, 3.0, -10.0, 10.0)};
    s.antennas = {s.waveguides[0].closest_point(s.users[0]),
                  s.waveguides[1].closest_point(s.users[1])};
    s.rho = 1e10;
    s.params = kParams;
    const ChannelMatrix h0 = channel_matrix(s);
    const auto zf0 = sinr(h0, zf_beamformer(h0), s.rho);
    const auto pm0 = sinr(h0, phase_matched_beamformer(s), s.rho);

    MisoScenario moved = s;
    for (int k = 0; k < 2; ++k)
      moved.waveguides[k].feed_point =
          moved.waveguides[k].point_at(-10.0 + 20.0 * rng.uniform01());
    const ChannelMatrix h1 = channel_matrix(moved);
    const auto zf1 = sinr(h1, zf_beamformer(h1), moved.rho);
    const auto pm1 = sinr(h1, phase_matched_beamformer(moved), moved.rho);
    for (int m = 0; m < 2; ++m) {
      worst_miso = std::max(worst_miso, std::abs(zf1[m] - zf0[m]) / zf0[m]);
      worst_miso = std::max(worst_miso, std::abs(pm1[m] - pm0[m]) / pm0[m]);
    }
  }

  const bool pass = worst_oma <= 1e-6 && worst_miso <= 1e-12;
  report(10, pass, "rates and SINRs are invariant to the feed-point location",
         "worst_oma_bound_gap=" + fmt_double(worst_oma) + " worst_miso_rel=" +
             fmt_double(worst_miso));
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
