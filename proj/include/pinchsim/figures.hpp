#pragma once

// One runner per CLI subcommand. Each builds trial plans from a resolved
// configuration, drives the Monte Carlo harness, attaches the analytical
// curves, and returns a CSV document with a provenance header.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pinchsim/config.hpp"
#include "pinchsim/csv.hpp"
#include "pinchsim/harness.hpp"
#include "pinchsim/miso.hpp"
#include "pinchsim/noma.hpp"
#include "pinchsim/single_antenna.hpp"
#include "pinchsim/version.hpp"

namespace pinchsim {

namespace detail {

inline CsvDocument sweep_document(const FigureConfig& cfg) {
  CsvDocument doc;
  doc.comments.push_back(std::string("pinchsim ") + kVersion);
  doc.comments.push_back("figure=" + cfg.figure + " seed=" + std::to_string(cfg.seed) +
                         " config_hash=" + hex64(fnv1a64(cfg.resolved.dump())));
  doc.comments.push_back("config=" + cfg.resolved.dump());
  doc.header = {"scheme", "curve", "power_dbm", "mean_rate", "stderr", "n_trials"};
  return doc;
}

inline void append_sweep(CsvDocument& doc, const std::string& scheme_label,
                         const std::string& curve_prefix, const SweepResult& r,
                         bool label_columns = true) {
  for (const auto& col : r.columns) {
    std::string curve = curve_prefix;
    if (label_columns && !(r.columns.size() == 1 && col.curve == "sum")) {
      if (!curve.empty()) curve += ":";
      curve += col.curve;
    }
    for (std::size_t p = 0; p < r.power_dbm.size(); ++p) {
      const MeanVarAcc& acc = col.per_power[p];
      doc.add_row({scheme_label, curve, fmt_double(r.power_dbm[p]), fmt_double(acc.mean),
                   fmt_double(acc.stderr_of_mean()), std::to_string(acc.n)});
    }
  }
}

inline void append_analytic(CsvDocument& doc, const std::string& scheme_label,
                            const std::string& curve, const std::vector<double>& sweep_dbm,
                            const std::vector<double>& values) {
  for (std::size_t p = 0; p < sweep_dbm.size(); ++p)
    doc.add_row({scheme_label, curve, fmt_double(sweep_dbm[p]), fmt_double(values[p]),
                 fmt_double(0.0), "0"});
}

inline TrialPlan base_plan(const FigureConfig& cfg) {
  TrialPlan plan;
  plan.seed = cfg.seed;
  plan.num_trials = cfg.trials;
  plan.sweep_dbm = cfg.sweep_dbm;
  plan.params = cfg.physical;
  plan.workers = cfg.workers;
  return plan;
}

inline std::vector<Point3> fig7_area_centers(const FigureConfig& cfg, int m_users) {
  std::vector<Point3> centers;
  for (int m = 1; m < m_users; ++m) {
    const double c = (m_users - m) * cfg.area_step_m;
    centers.push_back({c, c, 0.0});
  }
  centers.push_back({cfg.strong_area_center_m[0], cfg.strong_area_center_m[1], 0.0});
  return centers;
}

}  // namespace detail

inline CsvDocument run_fig4(const FigureConfig& cfg) {
  CsvDocument doc = detail::sweep_document(cfg);
  for (double side : cfg.sides_m) {
    const std::string curve = "D=" + fmt_double(side);
    TrialPlan plan = detail::base_plan(cfg);
    plan.deployment = Deployment::square({0.0, 0.0, 0.0}, side);

    plan.scheme = Scheme::kConventional;
    detail::append_sweep(doc, "conventional-mc", curve, run_sweep(plan));
    plan.scheme = Scheme::kPinching1;
    detail::append_sweep(doc, "pinching-mc", curve, run_sweep(plan));

    if (cfg.analytical) {
      std::vector<double> lemma, approx, bound, bound_hs;
      for (double dbm : cfg.sweep_dbm) {
        const SnrOperatingPoint op{dbm, cfg.physical, 1, side};
        lemma.push_back(ergodic_sum_rate_pinching(op));
        approx.push_back(ergodic_sum_rate_pinching_highsnr(op));
        bound.push_back(ergodic_sum_rate_conventional_bound(op));
        bound_hs.push_back(ergodic_sum_rate_conventional_bound_highsnr(op));
      }
      detail::append_analytic(doc, "pinching-analytic", curve, cfg.sweep_dbm, lemma);
      detail::append_analytic(doc, "pinching-approx", curve, cfg.sweep_dbm, approx);
      detail::append_analytic(doc, "conventional-bound", curve, cfg.sweep_dbm, bound);
      detail::append_analytic(doc, "conventional-bound-approx", curve, cfg.sweep_dbm, bound_hs);
    }
  }
  return doc;
}

inline CsvDocument run_fig5(const FigureConfig& cfg) {
  CsvDocument doc = detail::sweep_document(cfg);
  for (double long_side : cfg.long_sides_m) {
    const std::string curve = "DL=" + fmt_double(long_side);
    TrialPlan plan = detail::base_plan(cfg);
    // waveguide runs along the long side; the short side sets the y spread
    plan.deployment = Deployment::rectangle({0.0, 0.0, 0.0}, long_side, cfg.width_m);

    plan.scheme = Scheme::kConventional;
    detail::append_sweep(doc, "conventional-mc", curve, run_sweep(plan));
    plan.scheme = Scheme::kPinching1;
    detail::append_sweep(doc, "pinching-mc", curve, run_sweep(plan));

    if (cfg.analytical) {
      std::vector<double> lemma;
      for (double dbm : cfg.sweep_dbm) {
        const SnrOperatingPoint op{dbm, cfg.physical, 1, cfg.width_m};
        lemma.push_back(ergodic_sum_rate_pinching(op));
      }
      detail::append_analytic(doc, "pinching-analytic", curve, cfg.sweep_dbm, lemma);
    }
  }
  return doc;
}

inline CsvDocument run_fig6(const FigureConfig& cfg) {
  CsvDocument doc = detail::sweep_document(cfg);
  TrialPlan plan = detail::base_plan(cfg);
  plan.deployment = Deployment::square({0.0, 0.0, 0.0}, cfg.side_m);

  plan.scheme = Scheme::kConventional;
  detail::append_sweep(doc, "conventional-mc", "D=" + fmt_double(cfg.side_m), run_sweep(plan));

  plan.scheme = Scheme::kPinchingArrayOma;
  for (int n : cfg.antenna_counts) {
    plan.antenna_count = n;
    const SweepResult r = run_sweep(plan);
    const std::string curve = "N=" + std::to_string(n);
    SweepResult rate_only{r.power_dbm, {r.columns[0]}};
    SweepResult bound_only{r.power_dbm, {r.columns[1]}};
    detail::append_sweep(doc, "pinching-array-mc", curve, rate_only, false);
    detail::append_sweep(doc, "pinching-array-bound", curve, bound_only, false);
  }
  return doc;
}

inline CsvDocument run_fig7(const FigureConfig& cfg) {
  CsvDocument doc = detail::sweep_document(cfg);
  for (int m_users : cfg.user_counts) {
    const std::string curve = "M=" + std::to_string(m_users);
    TrialPlan plan = detail::base_plan(cfg);
    plan.deployment =
        Deployment::noma_areas(detail::fig7_area_centers(cfg, m_users), cfg.side_m);
    plan.scheme = Scheme::kNoma;
    plan.num_users = m_users;
    plan.antenna_count = m_users;

    {
      const SweepResult r = run_sweep(plan);
      SweepResult sum_only{r.power_dbm, {r.columns[static_cast<std::size_t>(m_users)]}};
      detail::append_sweep(doc, "noma-pinching", curve, sum_only, false);
    }
    {
      plan.noma_conventional_antenna = true;
      const SweepResult r = run_sweep(plan);
      SweepResult sum_only{r.power_dbm, {r.columns[static_cast<std::size_t>(m_users)]}};
      detail::append_sweep(doc, "noma-conventional", curve, sum_only, false);
      plan.noma_conventional_antenna = false;
    }
    if (cfg.analytical && m_users == 2) {
      const DerivedConstants c = derive_constants(cfg.physical);
      const NomaAllocation alloc = build_noma_coefficients(2);
      std::vector<double> lemma;
      for (double dbm : cfg.sweep_dbm)
        lemma.push_back(noma_ergodic_sum_highsnr(cfg.side_m, cfg.physical.waveguide_height_m,
                                                 dbm_to_watts(dbm), 2, alloc.alphas[1], c));
      detail::append_analytic(doc, "noma-analytic", curve, cfg.sweep_dbm, lemma);
    }
  }
  return doc;
}

inline CsvDocument run_fig8(const FigureConfig& cfg) {
  CsvDocument doc = detail::sweep_document(cfg);
  const Point3 weak_center{cfg.d1_m, cfg.d1_m, 0.0};
  const Point3 strong_center{-cfg.d2_m, 0.0, 0.0};

  TrialPlan plan = detail::base_plan(cfg);
  plan.deployment = Deployment::noma_pair(weak_center, strong_center, cfg.side_m);
  plan.scheme = Scheme::kNoma;
  plan.num_users = 2;
  plan.antenna_count = 2;
  plan.noma_alphas = cfg.alphas;
  {
    const SweepResult r = run_sweep(plan);
    SweepResult weak{r.power_dbm, {r.columns[0]}};
    SweepResult strong{r.power_dbm, {r.columns[1]}};
    detail::append_sweep(doc, "noma-pinching", "u1", weak, false);
    detail::append_sweep(doc, "noma-pinching", "u2", strong, false);
  }

  // single-pinching-antenna OMA baseline: each user served in its own slot
  for (int m = 0; m < 2; ++m) {
    TrialPlan oma = detail::base_plan(cfg);
    oma.deployment = Deployment::square(m == 0 ? weak_center : strong_center, cfg.side_m);
    oma.scheme = Scheme::kPinching1;
    oma.num_users = 2;
    detail::append_sweep(doc, "oma-pinching-1", "u" + std::to_string(m + 1), run_sweep(oma),
                         false);
  }

  // high-SNR ceiling of the weak user's rate
  const double ceiling = std::log2(1.0 + cfg.alphas[0] / cfg.alphas[1]);
  detail::append_analytic(doc, "noma-ceiling", "u1", cfg.sweep_dbm,
                          std::vector<double>(cfg.sweep_dbm.size(), ceiling));
  return doc;
}

inline CsvDocument run_gap(const FigureConfig& cfg) {
  CsvDocument doc = detail::sweep_document(cfg);
  for (double d1 : cfg.d1_list_m) {
    const std::string curve = "D1=" + fmt_double(d1);
    TrialPlan plan = detail::base_plan(cfg);
    plan.deployment = Deployment::noma_pair({d1, d1, 0.0}, {-cfg.d2_m, 0.0, 0.0}, cfg.side_m);
    plan.scheme = Scheme::kNoma;
    plan.num_users = 2;
    plan.antenna_count = 2;
    plan.noma_alphas = cfg.alphas;
    plan.noma_emit_oma_gap = true;
    const SweepResult r = run_sweep(plan);
    SweepResult gap{r.power_dbm, {r.columns[3]}};
    detail::append_sweep(doc, "noma-minus-oma-mc", curve, gap, false);
    if (cfg.analytical) {
      SweepResult formula{r.power_dbm, {r.columns[4]}};
      detail::append_sweep(doc, "noma-minus-oma-analytic", curve, formula, false);
    }
  }
  return doc;
}

inline CsvDocument run_fig9(const FigureConfig& cfg) {
  CsvDocument doc = detail::sweep_document(cfg);
  const bool near_pin = cfg.search_domain == "D2";

  TrialPlan plan = detail::base_plan(cfg);
  plan.deployment = Deployment::miso_rectangles({0.0, 0.0, 0.0}, cfg.side_m);
  plan.miso.domain = near_pin ? MisoSearchDomain::kNearPin : MisoSearchDomain::kFullWaveguide;
  plan.miso.window_wavelengths = cfg.window_wavelengths;
  plan.miso.step_wavelengths = cfg.step_wavelengths;
  plan.miso.coarse_step_wavelengths = cfg.coarse_step_wavelengths;
  plan.miso.fine_step_wavelengths = cfg.fine_step_wavelengths;
  plan.miso.fine_window_wavelengths = cfg.fine_window_wavelengths;

  auto emit = [&](Scheme scheme, const std::string& label) {
    plan.scheme = scheme;
    const SweepResult r = run_sweep(plan);
    SweepResult rmin{r.power_dbm, {r.columns[2]}};
    SweepResult sum{r.power_dbm, {r.columns[3]}};
    detail::append_sweep(doc, label, "rmin", rmin, false);
    detail::append_sweep(doc, label, "sum", sum, false);
  };

  emit(Scheme::kMisoSearch, near_pin ? "pinching-search-d2" : "pinching-search-d1");
  // benchmarks: fixed conventional antennas for the full-span variant,
  // pinch-at-closest-point for the near-pin variant
  plan.miso.conventional_antennas = !near_pin;
  const std::string prefix = near_pin ? "pinching" : "conventional";
  emit(Scheme::kMisoMrc, prefix + "-mrc");
  emit(Scheme::kMisoZf, prefix + "-zf");
  emit(Scheme::kMisoBound, prefix + "-bound");
  return doc;
}

// Per-realization max-min rate surface over the two micro-search windows.
inline CsvDocument run_fig10(const FigureConfig& cfg) {
  CsvDocument doc;
  doc.comments.push_back(std::string("pinchsim ") + kVersion);
  doc.comments.push_back("figure=fig10 seed=" + std::to_string(cfg.seed) +
                         " config_hash=" + hex64(fnv1a64(cfg.resolved.dump())));
  doc.comments.push_back("config=" + cfg.resolved.dump());
  doc.header = {"case", "delta1_m", "delta2_m", "rate1", "rate2", "rate_min"};

  const DerivedConstants c = derive_constants(cfg.physical);
  const double d = cfg.physical.waveguide_height_m;
  const double side = cfg.side_m;
  const double rho = dbm_to_watts(cfg.power_dbm) / c.noise_w;

  for (int case_idx = 1; case_idx <= cfg.cases; ++case_idx) {
    SplitMix64 rng = trial_stream(cfg.seed, static_cast<std::uint64_t>(case_idx));
    const Deployment square = Deployment::square({0.0, 0.0, 0.0}, side);
    MisoScenario s;
    s.users = {sample_user(square, 0, rng), sample_user(square, 0, rng)};
    s.waveguides = {make_waveguide(side / 3.0, d, -side / 2.0, side / 2.0),
                    make_waveguide(-side / 3.0, d, -side / 2.0, side / 2.0)};
    s.antennas = {s.waveguides[0].closest_point(s.users[0]),
                  s.waveguides[1].closest_point(s.users[1])};
    s.rho = rho;
    s.params = cfg.physical;
    doc.comments.push_back(
        "case=" + std::to_string(case_idx) + " user1=(" + fmt_double(s.users[0].x) + "," +
        fmt_double(s.users[0].y) + ") user2=(" + fmt_double(s.users[1].x) + "," +
        fmt_double(s.users[1].y) + ")");

    const auto g1 = search_grid(s.waveguides[0], s.antennas[0].x,
                                cfg.window_wavelengths * c.lambda_m,
                                cfg.step_wavelengths * c.lambda_m);
    const auto g2 = search_grid(s.waveguides[1], s.antennas[1].x,
                                cfg.window_wavelengths * c.lambda_m,
                                cfg.step_wavelengths * c.lambda_m);
    MisoScenario cell = s;
    for (double x1 : g1) {
      for (double x2 : g2) {
        cell.antennas = {s.waveguides[0].point_at(x1), s.waveguides[1].point_at(x2)};
        const ChannelMatrix h = channel_matrix(cell);
        std::array<double, 2> sinrs{0.0, 0.0};
        try {
          sinrs = sinr(h, zf_beamformer(h), rho);
        } catch (const SingularityError&) {
          // collinear cell: leave zero rate
        }
        const double r1 = std::log2(1.0 + sinrs[0]);
        const double r2 = std::log2(1.0 + sinrs[1]);
        doc.add_row({std::to_string(case_idx), fmt_double(x1 - s.antennas[0].x),
                     fmt_double(x2 - s.antennas[1].x), fmt_double(r1), fmt_double(r2),
                     fmt_double(std::min(r1, r2))});
      }
    }
  }
  return doc;
}

struct Table1Row {
  int realization = 0;
  std::string mode;
  double r1 = 0.0;
  double r2 = 0.0;
  double rmin = 0.0;
};

struct Table1Result {
  CsvDocument doc;
  int ordering_violations = 0;
  std::string detail;
};

// One seeded draw per realization. MRC and ZF keep the antennas at the
// closest points; Proposed runs the micro search; the Bound row is the
// single-user SINR cap evaluated at the searched positions, i.e. the target
// the proposed scheme tries to realize.
inline Table1Result run_table1(const FigureConfig& cfg) {
  Table1Result out;
  CsvDocument& doc = out.doc;
  doc.comments.push_back(std::string("pinchsim ") + kVersion);
  doc.comments.push_back("figure=table1 seed=" + std::to_string(cfg.seed) +
                         " config_hash=" + hex64(fnv1a64(cfg.resolved.dump())));
  doc.comments.push_back("config=" + cfg.resolved.dump());
  doc.header = {"realization", "mode", "r1", "r2", "r_min"};

  const DerivedConstants c = derive_constants(cfg.physical);
  const double d = cfg.physical.waveguide_height_m;
  const double side = cfg.side_m;
  const double rho = dbm_to_watts(cfg.power_dbm) / c.noise_w;
  const Deployment square = Deployment::square({0.0, 0.0, 0.0}, side);

  auto rate = [](double s) { return std::log2(1.0 + s); };

  for (int r = 1; r <= cfg.realizations; ++r) {
    SplitMix64 rng = trial_stream(cfg.seed, static_cast<std::uint64_t>(r));
    MisoScenario s;
    s.users = {sample_user(square, 0, rng), sample_user(square, 0, rng)};
    s.waveguides = {make_waveguide(side / 3.0, d, -side / 2.0, side / 2.0),
                    make_waveguide(-side / 3.0, d, -side / 2.0, side / 2.0)};
    s.antennas = {s.waveguides[0].closest_point(s.users[0]),
                  s.waveguides[1].closest_point(s.users[1])};
    s.rho = rho;
    s.params = cfg.physical;

    const ChannelMatrix h = channel_matrix(s);
    const auto mrc = sinr(h, mrc_beamformer(h), rho);
    std::array<double, 2> zf{0.0, 0.0};
    try {
      zf = sinr(h, zf_beamformer(h), rho);
    } catch (const SingularityError&) {
    }

    const auto g1 = search_grid(s.waveguides[0], s.antennas[0].x,
                                cfg.window_wavelengths * c.lambda_m,
                                cfg.step_wavelengths * c.lambda_m);
    const auto g2 = search_grid(s.waveguides[1], s.antennas[1].x,
                                cfg.window_wavelengths * c.lambda_m,
                                cfg.step_wavelengths * c.lambda_m);
    const SearchResult proposed = algorithm1_search(s, g1, g2);
    MisoScenario at_best = s;
    at_best.antennas = proposed.antennas;
    const auto bound = sinr_upper_bound(channel_matrix(at_best), rho);

    const Table1Row rows[4] = {
        {r, "MRC", rate(mrc[0]), rate(mrc[1]), rate(std::min(mrc[0], mrc[1]))},
        {r, "ZF", rate(zf[0]), rate(zf[1]), rate(std::min(zf[0], zf[1]))},
        {r, "Bound", rate(bound[0]), rate(bound[1]), rate(std::min(bound[0], bound[1]))},
        {r, "Proposed", rate(proposed.sinrs[0]), rate(proposed.sinrs[1]),
         rate(std::min(proposed.sinrs[0], proposed.sinrs[1]))},
    };
    for (const auto& row : rows)
      doc.add_row({std::to_string(row.realization), row.mode, fmt_double(row.r1),
                   fmt_double(row.r2), fmt_double(row.rmin)});

    const double eps = 1e-12;
    if (!(rows[0].rmin <= rows[1].rmin + eps && rows[1].rmin <= rows[3].rmin + eps &&
          rows[3].rmin <= rows[2].rmin + eps)) {
      ++out.ordering_violations;
      out.detail += "realization " + std::to_string(r) + ": min-rate ordering violated ";
    }
  }
  return out;
}

}  // namespace pinchsim
