#pragma once

// Seeded Monte Carlo engine: uniform user samplers, the per-scheme trial
// evaluators, and deterministic aggregation. Trials fan out to a worker pool
// in fixed-size blocks; block accumulators merge pairwise in index order, so
// the output is bit-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pinchsim/errors.hpp"
#include "pinchsim/geometry.hpp"
#include "pinchsim/miso.hpp"
#include "pinchsim/noma.hpp"
#include "pinchsim/rng.hpp"
#include "pinchsim/single_antenna.hpp"
#include "pinchsim/waveguide_array.hpp"

namespace pinchsim {

inline Point3 sample_user(const Deployment& dep, std::size_t region_index, SplitMix64& rng) {
  if (region_index >= dep.regions.size())
    throw GeometryError("region index out of range: " + std::to_string(region_index));
  const Region& r = dep.regions[region_index];
  const double u = rng.uniform01();
  const double v = rng.uniform01();
  return {r.center.x + (u - 0.5) * r.side_x_m, r.center.y + (v - 0.5) * r.side_y_m, 0.0};
}

// Streaming mean/variance accumulator with an associative merge, so partial
// aggregates can be combined in any grouping.
struct MeanVarAcc {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const MeanVarAcc& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const long long t = n + o.n;
    m2 += o.m2 + d * d * (static_cast<double>(n) * static_cast<double>(o.n) /
                          static_cast<double>(t));
    mean += d * static_cast<double>(o.n) / static_cast<double>(t);
    n = t;
  }

  double stderr_of_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

enum class Scheme {
  kConventional,
  kPinching1,
  kPinchingArrayOma,
  kNoma,
  kMisoMrc,
  kMisoZf,
  kMisoBound,
  kMisoSearch,
};

inline std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kConventional: return "conventional";
    case Scheme::kPinching1: return "pinching-1";
    case Scheme::kPinchingArrayOma: return "pinching-N-oma";
    case Scheme::kNoma: return "noma";
    case Scheme::kMisoMrc: return "miso-mrc";
    case Scheme::kMisoZf: return "miso-zf";
    case Scheme::kMisoBound: return "miso-bound";
    case Scheme::kMisoSearch: return "miso-search";
  }
  return "unknown";
}

enum class MisoSearchDomain { kNearPin, kFullWaveguide };

struct MisoOptions {
  MisoSearchDomain domain = MisoSearchDomain::kNearPin;
  double window_wavelengths = 10.0;       // near-pin half window
  double step_wavelengths = 0.1;          // near-pin grid step
  double coarse_step_wavelengths = 1.0;   // full-span first pass
  double fine_step_wavelengths = 0.05;    // refinement pass
  double fine_window_wavelengths = 2.0;   // refinement half window
  bool conventional_antennas = false;     // fixed antennas at (+-lambda/4, 0, d)
};

struct TrialPlan {
  std::uint64_t seed = 1;
  std::int64_t num_trials = 1;
  Deployment deployment = Deployment::square({0.0, 0.0, 0.0}, 10.0);
  Scheme scheme = Scheme::kPinching1;
  std::vector<double> sweep_dbm = {30.0};
  PhysicalParams params{};
  int antenna_count = 1;             // N for the OMA array and NOMA
  int num_users = 1;                 // M (TDMA slots / NOMA users)
  std::vector<double> noma_alphas;   // empty: descending odd-weight defaults
  bool noma_conventional_antenna = false;  // benchmark: one fixed antenna at (0,0,d)
  bool noma_emit_oma_gap = false;          // extra columns: NOMA-vs-OMA gap and its closed form
  double waveguide_overhang_m = 1.0; // track extension beyond the region extent
  MisoOptions miso{};
  int workers = 0;  // 0 = hardware concurrency; PINCHSIM_WORKERS caps it

  void validate() const {
    if (num_trials < 1) throw ParameterError("num_trials must be >= 1");
    if (sweep_dbm.empty()) throw ParameterError("sweep must be nonempty");
    for (std::size_t i = 1; i < sweep_dbm.size(); ++i)
      if (!(sweep_dbm[i] > sweep_dbm[i - 1]))
        throw ParameterError("sweep must be strictly increasing");
  }
};

struct SweepColumn {
  std::string curve;
  std::vector<MeanVarAcc> per_power;
};

struct SweepResult {
  std::vector<double> power_dbm;
  std::vector<SweepColumn> columns;
};

namespace detail {

inline int resolve_workers(int requested) {
  int base = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (base < 1) base = 1;
  if (const char* env = std::getenv("PINCHSIM_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap > 0) base = std::min(base, cap);
  }
  return base;
}

// Pairwise merge in index order: deterministic and numerically balanced.
inline MeanVarAcc merge_range(const std::vector<MeanVarAcc>& accs, std::size_t stride,
                              std::size_t offset, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return accs[lo * stride + offset];
  const std::size_t mid = lo + (hi - lo) / 2;
  MeanVarAcc left = merge_range(accs, stride, offset, lo, mid);
  left.merge(merge_range(accs, stride, offset, mid, hi));
  return left;
}

// The common waveguide used by the single-waveguide schemes: runs over y = 0
// across the deployment extent plus an overhang so placement searches near
// the region edge stay feasible.
inline Waveguide plan_waveguide(const TrialPlan& plan) {
  const auto [lo, hi] = x_extent(plan.deployment);
  return make_waveguide(0.0, plan.params.waveguide_height_m,
                        lo - plan.waveguide_overhang_m, hi + plan.waveguide_overhang_m);
}

struct TrialContext {
  const TrialPlan& plan;
  const DerivedConstants& consts;
  const std::vector<double>& power_w;  // one entry per sweep point
  Waveguide waveguide;                 // single-waveguide schemes
  std::array<Waveguide, 2> miso_waveguides;
  double miso_side = 0.0;
};

using TrialFn = std::function<void(const TrialContext&, std::uint64_t trial,
                                   std::vector<double>& out)>;

// --- per-scheme trial evaluators; `out` is column-major [col * n_power + p] --

inline void trial_conventional(const TrialContext& ctx, std::uint64_t trial,
                               std::vector<double>& out) {
  SplitMix64 rng = trial_stream(ctx.plan.seed, trial);
  const Point3 user = sample_user(ctx.plan.deployment, 0, rng);
  const Point3 antenna{0.0, 0.0, ctx.plan.params.waveguide_height_m};
  for (std::size_t p = 0; p < ctx.power_w.size(); ++p)
    out[p] = rate_conventional_instant(user, antenna, ctx.power_w[p], ctx.plan.num_users,
                                       ctx.consts);
}

inline void trial_pinching1(const TrialContext& ctx, std::uint64_t trial,
                            std::vector<double>& out) {
  SplitMix64 rng = trial_stream(ctx.plan.seed, trial);
  const Point3 user = sample_user(ctx.plan.deployment, 0, rng);
  for (std::size_t p = 0; p < ctx.power_w.size(); ++p)
    out[p] = rate_pinching_instant(user, ctx.power_w[p], ctx.plan.num_users, ctx.consts,
                                   ctx.plan.params.waveguide_height_m);
}

// Columns: searched rate, clustered bound.
inline void trial_pinching_array(const TrialContext& ctx, std::uint64_t trial,
                                 std::vector<double>& out) {
  SplitMix64 rng = trial_stream(ctx.plan.seed, trial);
  const Point3 user = sample_user(ctx.plan.deployment, 0, rng);
  const AntennaArray array =
      place_antennas_oma(user, ctx.plan.antenna_count, ctx.waveguide, ctx.consts);
  const std::size_t np = ctx.power_w.size();
  for (std::size_t p = 0; p < np; ++p) {
    out[p] = rate_oma_array(user, array, ctx.power_w[p], 1, ctx.consts);
    out[np + p] = rate_oma_bound(user, array, ctx.power_w[p], 1, ctx.consts).clustered;
  }
}

// Columns: per-user rates (weakest first), then the sum; with the gap flag,
// additionally the per-realization NOMA-minus-OMA sum-rate gap and its
// high-SNR closed form (the OMA slots run at M times the power so both
// schemes spend the same energy over a frame).
inline void trial_noma(const TrialContext& ctx, std::uint64_t trial,
                       std::vector<double>& out) {
  SplitMix64 rng = trial_stream(ctx.plan.seed, trial);
  const int m_users = ctx.plan.num_users;
  std::vector<Point3> users;
  users.reserve(m_users);
  for (int m = 0; m < m_users; ++m)
    users.push_back(sample_user(ctx.plan.deployment, static_cast<std::size_t>(m), rng));
  const NomaAllocation alloc = ctx.plan.noma_alphas.empty()
                                   ? build_noma_coefficients(m_users)
                                   : NomaAllocation{ctx.plan.noma_alphas};
  const std::size_t np = ctx.power_w.size();
  const double d = ctx.plan.params.waveguide_height_m;

  std::vector<std::complex<double>> conv_channels;
  if (ctx.plan.noma_conventional_antenna) {
    const Point3 antenna{0.0, 0.0, d};
    for (const auto& u : users) {
      const double r = distance(u, antenna);
      conv_channels.push_back(
          std::polar(std::sqrt(ctx.consts.eta_m2) / r, -kTwoPi * r / ctx.consts.lambda_m));
    }
  }

  std::vector<AntennaArray> oma_arrays;
  if (ctx.plan.noma_emit_oma_gap) {
    for (const auto& u : users)
      oma_arrays.push_back(place_antennas_oma(u, m_users, ctx.waveguide, ctx.consts));
  }

  for (std::size_t p = 0; p < np; ++p) {
    const NomaResult r =
        ctx.plan.noma_conventional_antenna
            ? noma_rates_from_channels(conv_channels, alloc, ctx.power_w[p], ctx.consts.noise_w)
            : noma_rates(users, alloc, ctx.power_w[p], ctx.waveguide, ctx.consts);
    double sum = 0.0;
    for (int m = 0; m < m_users; ++m) {
      out[m * np + p] = r.rates[m];
      sum += r.rates[m];
    }
    out[m_users * np + p] = sum;

    if (ctx.plan.noma_emit_oma_gap) {
      double oma_sum = 0.0;
      for (int m = 0; m < m_users; ++m)
        oma_sum += rate_oma_array(users[m], oma_arrays[m], m_users * ctx.power_w[p], m_users,
                                  ctx.consts);
      const double dist_weak = distance(users[r.order.front()],
                                        ctx.waveguide.closest_point(users[r.order.front()]));
      const double dist_strong = distance(users[r.order.back()],
                                          ctx.waveguide.closest_point(users[r.order.back()]));
      out[(m_users + 1) * np + p] = sum - oma_sum;
      out[(m_users + 2) * np + p] = noma_oma_gap_highsnr(dist_weak, dist_strong);
    }
  }
}

inline std::array<Point3, 2> miso_draw_users(const TrialContext& ctx, SplitMix64& rng) {
  const Deployment& dep = ctx.plan.deployment;
  if (dep.regions.size() >= 2)
    return {sample_user(dep, 0, rng), sample_user(dep, 1, rng)};
  return {sample_user(dep, 0, rng), sample_user(dep, 0, rng)};
}

// Columns: r1, r2, min, sum.
inline void trial_miso_fixed_beamformer(const TrialContext& ctx, std::uint64_t trial,
                                        std::vector<double>& out) {
  SplitMix64 rng = trial_stream(ctx.plan.seed, trial);
  const std::array<Point3, 2> users = miso_draw_users(ctx, rng);

  ChannelMatrix h;
  if (ctx.plan.miso.conventional_antennas) {
    const double d = ctx.plan.params.waveguide_height_m;
    const std::array<Point3, 2> antennas = {
        Point3{ctx.consts.lambda_m / 4.0, 0.0, d}, Point3{-ctx.consts.lambda_m / 4.0, 0.0, d}};
    h = fixed_antenna_channel_matrix(users, antennas, ctx.consts);
  } else {
    MisoScenario s;
    s.users = users;
    s.waveguides = ctx.miso_waveguides;
    s.antennas = {ctx.miso_waveguides[0].closest_point(users[0]),
                  ctx.miso_waveguides[1].closest_point(users[1])};
    s.rho = 1.0;
    s.params = ctx.plan.params;
    h = channel_matrix(s);
  }

  const std::size_t np = ctx.power_w.size();
  for (std::size_t p = 0; p < np; ++p) {
    const double rho = ctx.power_w[p] / ctx.consts.noise_w;
    std::array<double, 2> sinrs{};
    switch (ctx.plan.scheme) {
      case Scheme::kMisoBound:
        sinrs = sinr_upper_bound(h, rho);
        break;
      case Scheme::kMisoMrc:
        sinrs = sinr(h, mrc_beamformer(h), rho);
        break;
      case Scheme::kMisoZf: {
        try {
          sinrs = sinr(h, zf_beamformer(h), rho);
        } catch (const SingularityError&) {
          sinrs = {0.0, 0.0};  // collinear draw: ZF delivers nothing
        }
        break;
      }
      default:
        throw ConfigError("scheme is not a fixed-beamformer MISO scheme");
    }
    const double r1 = std::log2(1.0 + sinrs[0]);
    const double r2 = std::log2(1.0 + sinrs[1]);
    out[0 * np + p] = r1;
    out[1 * np + p] = r2;
    out[2 * np + p] = std::min(r1, r2);
    out[3 * np + p] = r1 + r2;
  }
}

// Columns: r1, r2, min, sum. The ZF max-min objective scales linearly with
// rho, so one location search per trial serves every power point.
inline void trial_miso_search(const TrialContext& ctx, std::uint64_t trial,
                              std::vector<double>& out) {
  SplitMix64 rng = trial_stream(ctx.plan.seed, trial);
  MisoScenario s;
  s.users = miso_draw_users(ctx, rng);
  s.waveguides = ctx.miso_waveguides;
  s.antennas = {ctx.miso_waveguides[0].closest_point(s.users[0]),
                ctx.miso_waveguides[1].closest_point(s.users[1])};
  s.rho = 1.0;
  s.params = ctx.plan.params;

  const MisoOptions& opt = ctx.plan.miso;
  const double lambda = ctx.consts.lambda_m;
  SearchResult best;
  if (opt.domain == MisoSearchDomain::kNearPin) {
    const auto g1 = search_grid(s.waveguides[0], s.antennas[0].x,
                                opt.window_wavelengths * lambda, opt.step_wavelengths * lambda);
    const auto g2 = search_grid(s.waveguides[1], s.antennas[1].x,
                                opt.window_wavelengths * lambda, opt.step_wavelengths * lambda);
    best = algorithm1_search(s, g1, g2);
  } else {
    const auto c1 = full_span_grid(s.waveguides[0], opt.coarse_step_wavelengths * lambda);
    const auto c2 = full_span_grid(s.waveguides[1], opt.coarse_step_wavelengths * lambda);
    const SearchResult coarse = algorithm1_search(s, c1, c2);
    auto f1 = search_grid(s.waveguides[0], coarse.antennas[0].x,
                          opt.fine_window_wavelengths * lambda, opt.fine_step_wavelengths * lambda);
    auto f2 = search_grid(s.waveguides[1], coarse.antennas[1].x,
                          opt.fine_window_wavelengths * lambda, opt.fine_step_wavelengths * lambda);
    f1.push_back(coarse.antennas[0].x);  // refinement never loses the coarse winner
    f2.push_back(coarse.antennas[1].x);
    best = algorithm1_search(s, f1, f2);
  }

  const std::size_t np = ctx.power_w.size();
  for (std::size_t p = 0; p < np; ++p) {
    const double rho = ctx.power_w[p] / ctx.consts.noise_w;
    const double r1 = std::log2(1.0 + rho * best.sinrs[0]);
    const double r2 = std::log2(1.0 + rho * best.sinrs[1]);
    out[0 * np + p] = r1;
    out[1 * np + p] = r2;
    out[2 * np + p] = std::min(r1, r2);
    out[3 * np + p] = r1 + r2;
  }
}

inline std::vector<std::string> scheme_columns(const TrialPlan& plan) {
  switch (plan.scheme) {
    case Scheme::kConventional:
    case Scheme::kPinching1:
      return {"sum"};
    case Scheme::kPinchingArrayOma:
      return {"rate", "bound"};
    case Scheme::kNoma: {
      std::vector<std::string> cols;
      for (int m = 1; m <= plan.num_users; ++m) cols.push_back("u" + std::to_string(m));
      cols.push_back("sum");
      if (plan.noma_emit_oma_gap) {
        cols.push_back("gap");
        cols.push_back("gap_formula");
      }
      return cols;
    }
    default:
      return {"r1", "r2", "rmin", "sum"};
  }
}

inline void check_scheme_deployment(const TrialPlan& plan) {
  const auto kind = plan.deployment.kind;
  const std::size_t regions = plan.deployment.regions.size();
  switch (plan.scheme) {
    case Scheme::kConventional:
    case Scheme::kPinching1:
    case Scheme::kPinchingArrayOma:
      if (regions != 1)
        throw ConfigError("single-user schemes need a one-region deployment");
      break;
    case Scheme::kNoma:
      if (kind != DeploymentKind::kNomaAreas ||
          regions != static_cast<std::size_t>(plan.num_users))
        throw ConfigError("noma scheme needs one deployment area per user");
      if (plan.noma_conventional_antenna && plan.noma_emit_oma_gap)
        throw ConfigError("gap columns require the pinching-antenna NOMA path");
      break;
    default:
      if (!(kind == DeploymentKind::kSquare || kind == DeploymentKind::kMisoRectangles))
        throw ConfigError("miso schemes need a square or split-rectangle deployment");
      break;
  }
}

}  // namespace detail

inline SweepResult run_sweep(const TrialPlan& plan) {
  plan.validate();
  detail::check_scheme_deployment(plan);
  const DerivedConstants consts = derive_constants(plan.params);

  std::vector<double> power_w;
  power_w.reserve(plan.sweep_dbm.size());
  for (double dbm : plan.sweep_dbm) power_w.push_back(dbm_to_watts(dbm));

  detail::TrialContext ctx{plan, consts, power_w, Waveguide{}, {}, 0.0};
  ctx.waveguide = detail::plan_waveguide(plan);
  if (plan.scheme == Scheme::kMisoMrc || plan.scheme == Scheme::kMisoZf ||
      plan.scheme == Scheme::kMisoBound || plan.scheme == Scheme::kMisoSearch) {
    const auto [lo, hi] = x_extent(plan.deployment);
    const double side = hi - lo;
    ctx.miso_side = side;
    const double d = plan.params.waveguide_height_m;
    ctx.miso_waveguides = {make_waveguide(side / 3.0, d, lo, hi),
                           make_waveguide(-side / 3.0, d, lo, hi)};
  }

  detail::TrialFn fn;
  switch (plan.scheme) {
    case Scheme::kConventional: fn = detail::trial_conventional; break;
    case Scheme::kPinching1: fn = detail::trial_pinching1; break;
    case Scheme::kPinchingArrayOma: fn = detail::trial_pinching_array; break;
    case Scheme::kNoma: fn = detail::trial_noma; break;
    case Scheme::kMisoSearch: fn = detail::trial_miso_search; break;
    default: fn = detail::trial_miso_fixed_beamformer; break;
  }

  const std::vector<std::string> columns = detail::scheme_columns(plan);
  const std::size_t n_cols = columns.size();
  const std::size_t n_pow = power_w.size();
  const std::size_t n_stats = n_cols * n_pow;

  constexpr std::int64_t kBlock = 1024;
  const std::int64_t n_blocks = (plan.num_trials + kBlock - 1) / kBlock;
  std::vector<MeanVarAcc> block_accs(static_cast<std::size_t>(n_blocks) * n_stats);

  const int workers = detail::resolve_workers(plan.workers);
  std::atomic<std::int64_t> next_block{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker_loop = [&] {
    std::vector<double> values(n_stats);
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::int64_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min<std::int64_t>(lo + kBlock, plan.num_trials);
      MeanVarAcc* accs = &block_accs[static_cast<std::size_t>(b) * n_stats];
      try {
        for (std::int64_t t = lo; t < hi; ++t) {
          fn(ctx, static_cast<std::uint64_t>(t), values);
          for (std::size_t s = 0; s < n_stats; ++s) accs[s].add(values[s]);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers <= 1 || n_blocks == 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, n_blocks));
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker_loop);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult result;
  result.power_dbm = plan.sweep_dbm;
  result.columns.resize(n_cols);
  for (std::size_t cidx = 0; cidx < n_cols; ++cidx) {
    result.columns[cidx].curve = columns[cidx];
    result.columns[cidx].per_power.resize(n_pow);
    for (std::size_t p = 0; p < n_pow; ++p) {
      result.columns[cidx].per_power[p] = detail::merge_range(
          block_accs, n_stats, cidx * n_pow + p, 0, static_cast<std::size_t>(n_blocks));
    }
  }
  return result;
}

}  // namespace pinchsim
