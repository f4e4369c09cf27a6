#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pinchsim/harness.hpp"
#include "pinchsim/quadrature.hpp"
#include "pinchsim/rng.hpp"
#include "pinchsim/single_antenna.hpp"

using namespace pinchsim;
using Catch::Approx;

namespace {

const PhysicalParams kParams{};
const DerivedConstants kConsts = derive_constants(kParams);

// transmit power that makes eta * P / sigma^2 equal the requested value
double power_for_gamma(double gamma) { return gamma * kConsts.noise_w / kConsts.eta_m2; }

double dbm_for_gamma(double gamma) {
  return 10.0 * std::log10(power_for_gamma(gamma)) + 30.0;
}

SnrOperatingPoint op_for(double gamma, double side) {
  return SnrOperatingPoint{dbm_for_gamma(gamma), kParams, 1, side};
}

}  // namespace

TEST_CASE("instantaneous conventional rate") {
  CHECK(rate_conventional_instant({0, 0, 0}, {0, 0, 3}, power_for_gamma(9.0), 1, kConsts) ==
        Approx(1.0).epsilon(1e-12));
  CHECK(rate_conventional_instant({4, 0, 0}, {0, 0, 3}, power_for_gamma(25.0), 2, kConsts) ==
        Approx(0.5).epsilon(1e-12));
  CHECK(rate_conventional_instant({0, 0, 0}, {0, 0, 3}, 1e-30, 1, kConsts) ==
        Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(rate_conventional_instant({0, 0, 0}, {0, 0, 0}, 1.0, 1, kConsts),
                  ParameterError);
}

TEST_CASE("instantaneous pinching rate") {
  CHECK(rate_pinching_instant({10, 0, 0}, power_for_gamma(9.0), 1, kConsts, 3.0) ==
        Approx(1.0).epsilon(1e-12));
  CHECK(rate_pinching_instant({5, 4, 0}, power_for_gamma(25.0), 1, kConsts, 3.0) ==
        Approx(1.0).epsilon(1e-12));
  // the rate depends on the user's y-offset only
  CHECK(rate_pinching_instant({-3, 2, 0}, 1.0, 1, kConsts, 3.0) ==
        rate_pinching_instant({8, 2, 0}, 1.0, 1, kConsts, 3.0));
}

TEST_CASE("per-sample dominance of the pinching antenna") {
  SplitMix64 rng{5};
  const double power = dbm_to_watts(30.0);
  for (int i = 0; i < 5000; ++i) {
    const Point3 user{20 * rng.uniform01() - 10, 20 * rng.uniform01() - 10, 0};
    const double conv = rate_conventional_instant(user, {0, 0, 3}, power, 1, kConsts);
    const double pin = rate_pinching_instant(user, power, 1, kConsts, 3.0);
    REQUIRE(pin >= conv - 1e-12);
  }
}

TEST_CASE("g closed form") {
  const double expected = 2.0 * kLog2E * std::atan(1.0) - 2.0 * kLog2E + 1.0;
  CHECK(g_closed(1.0, 2.0) == Approx(expected).epsilon(1e-14));
  CHECK(g_closed(1.0, 2.0) == Approx(0.3807).epsilon(1e-3));
  CHECK(g_closed(5.0, 0.0) == 0.0);
  CHECK_THROWS_AS(g_closed(0.0, 2.0), ParameterError);
  CHECK_THROWS_AS(g_closed(-1.0, 2.0), ParameterError);

  const double quad =
      adaptive_simpson([](double y) { return std::log2(y * y + 4.0); }, 0.0, 5.0);
  CHECK(g_closed(4.0, 10.0) == Approx(quad).margin(1e-9));
}

TEST_CASE("g and g2 closed forms match adaptive quadrature") {
  SplitMix64 rng{17};
  for (int i = 0; i < 300; ++i) {
    const double a = 1e-4 * std::exp(rng.uniform01() * std::log(1e12));
    const double D = 0.5 * std::exp(rng.uniform01() * std::log(100.0));
    const double gq =
        adaptive_simpson([a](double y) { return std::log2(y * y + a); }, 0.0, D / 2.0);
    REQUIRE(g_closed(a, D) == Approx(gq).margin(1e-9));
    const double g2q =
        adaptive_simpson([a](double z) { return std::log(z + a); }, 0.0, D * D / 4.0);
    REQUIRE(g2_closed(a, D) == Approx(g2q).margin(1e-9));
  }
}

TEST_CASE("ergodic pinching rate equals its integral decomposition") {
  SplitMix64 rng{23};
  for (int i = 0; i < 1000; ++i) {
    PhysicalParams p = kParams;
    p.waveguide_height_m = 1.0 + 9.0 * rng.uniform01();
    const double D = 1.0 + 49.0 * rng.uniform01();
    const SnrOperatingPoint op{50.0 * rng.uniform01(), p, 1, D};
    const double d2 = p.waveguide_height_m * p.waveguide_height_m;
    const double direct = ergodic_sum_rate_pinching(op);
    const double via_g = (2.0 / D) * (g_closed(d2 + op.gamma(), D) - g_closed(d2, D));
    REQUIRE(direct == Approx(via_g).epsilon(1e-12));
  }
}

TEST_CASE("ergodic pinching rate vanishes with the transmit power") {
  SnrOperatingPoint op{-150.0, kParams, 1, 10.0};
  CHECK(ergodic_sum_rate_pinching(op) == Approx(0.0).margin(1e-6));
}

TEST_CASE("ergodic pinching rate matches Monte Carlo at growing trial counts") {
  const SnrOperatingPoint op{30.0, kParams, 1, 10.0};
  const double closed = ergodic_sum_rate_pinching(op);
  for (std::int64_t n : {10000, 100000}) {
    TrialPlan plan;
    plan.seed = 99;
    plan.num_trials = n;
    plan.deployment = Deployment::square({0, 0, 0}, 10.0);
    plan.scheme = Scheme::kPinching1;
    plan.sweep_dbm = {30.0};
    plan.params = kParams;
    const SweepResult r = run_sweep(plan);
    const MeanVarAcc& acc = r.columns[0].per_power[0];
    REQUIRE(std::abs(acc.mean - closed) <= 3.0 * acc.stderr_of_mean());
  }
}

TEST_CASE("high-SNR approximation converges to the exact ergodic rate") {
  const double exact6 = ergodic_sum_rate_pinching(op_for(1e6, 10.0));
  const double approx6 = ergodic_sum_rate_pinching_highsnr(op_for(1e6, 10.0));
  const double exact12 = ergodic_sum_rate_pinching(op_for(1e12, 10.0));
  const double approx12 = ergodic_sum_rate_pinching_highsnr(op_for(1e12, 10.0));
  CHECK(std::abs(approx12 - exact12) < std::abs(approx6 - exact6));

  const double exact14 = ergodic_sum_rate_pinching(op_for(1e14, 10.0));
  const double approx14 = ergodic_sum_rate_pinching_highsnr(op_for(1e14, 10.0));
  CHECK(std::abs(approx14 - exact14) < 1e-3);

  CHECK(2.0 * kLog2E == Approx(2.885).epsilon(1e-3));
}

TEST_CASE("conventional bound dominates the square-deployment Monte Carlo") {
  const SnrOperatingPoint op{30.0, kParams, 1, 10.0};
  const double bound = ergodic_sum_rate_conventional_bound(op);

  TrialPlan plan;
  plan.seed = 7;
  plan.num_trials = 100000;
  plan.deployment = Deployment::square({0, 0, 0}, 10.0);
  plan.scheme = Scheme::kConventional;
  plan.sweep_dbm = {30.0};
  plan.params = kParams;
  const SweepResult r = run_sweep(plan);
  const MeanVarAcc& acc = r.columns[0].per_power[0];
  CHECK(bound >= acc.mean + 3.0 * acc.stderr_of_mean());

  CHECK(ergodic_sum_rate_conventional_bound(
            SnrOperatingPoint{-150.0, kParams, 1, 10.0}) == Approx(0.0).margin(1e-6));
}

TEST_CASE("conventional high-SNR bound") {
  const double exact14 = ergodic_sum_rate_conventional_bound(op_for(1e14, 10.0));
  const double approx14 = ergodic_sum_rate_conventional_bound_highsnr(op_for(1e14, 10.0));
  CHECK(std::abs(approx14 - exact14) < 1e-3);
  CHECK(kLog2E == Approx(1.4427).epsilon(1e-4));

  // the two d-dependent correction terms cancel as d grows with D fixed
  double prev = 1e9;
  for (double d : {10.0, 100.0, 1000.0, 10000.0}) {
    const double q = 25.0;
    const double term = kLog2E - (d * d / q) * std::log2((q + d * d) / (d * d));
    REQUIRE(std::abs(term) < prev);
    prev = std::abs(term);
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("high-SNR gap reduces to g3 of the aspect ratio") {
  SplitMix64 rng{31};
  for (int i = 0; i < 300; ++i) {
    PhysicalParams p = kParams;
    p.waveguide_height_m = 0.5 + 9.5 * rng.uniform01();
    const double D = 1.0 + 49.0 * rng.uniform01();
    const SnrOperatingPoint op{50.0, p, 1, D};
    const double gap = ergodic_sum_rate_pinching_highsnr(op) -
                       ergodic_sum_rate_conventional_bound_highsnr(op);
    REQUIRE(gap == Approx(rate_gap_highsnr(D, p.waveguide_height_m)).margin(1e-10));
    REQUIRE(gap >= 0.0);
  }
}

TEST_CASE("g3 limit, value and monotonicity") {
  CHECK(g3(0.0) == 0.0);
  CHECK(g3(1e-10) == Approx(0.0).margin(1e-18));
  CHECK(g3(1e-10) > 0.0);
  CHECK(g3(1.0) == Approx(kLog2E - 2.0 * kLog2E * (std::numbers::pi / 4.0) + 1.0)
                       .epsilon(1e-14));

  double prev = -1.0;
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
    REQUIRE(g3(x) > prev);
    prev = g3(x);
  }

  // direct branches agree with the hand-evaluated series just past the switch
  {
    const double x = 1.05e-4;
    const double x2 = x * x;
    CHECK(g3(x) == Approx(kLog2E * x2 * (1.0 / 6.0 - x2 / 15.0)).epsilon(1e-4));
    CHECK(g4(x) == Approx(kLog2E * x * x2 * (1.0 / 6.0 - 2.0 * x2 / 15.0)).epsilon(1e-4));
  }
  {
    const double x = 1.05e-3;
    const double x2 = x * x;
    CHECK(g5(x) == Approx(kLog2E * x2 * x2 * (0.5 - 2.0 * x2 / 3.0)).epsilon(1e-4));
  }
}

TEST_CASE("monotonicity chain of g3, g4, g5") {
  double prev3 = g3(0.0), prev5 = g5(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double x = 0.1 * i;
    REQUIRE(g3(x) >= prev3 - 1e-12);
    REQUIRE(g5(x) >= prev5 - 1e-12);
    REQUIRE(g4(x) >= -1e-12);
    prev3 = g3(x);
    prev5 = g5(x);
  }
}
