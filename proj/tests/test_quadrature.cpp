#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>

#include "grushin/quadrature.hpp"
#include "grushin/solutions.hpp"

using namespace grushin;

namespace {

const Dims kDefault(2, 1, 1.0);

QuadPolicy test_policy(std::size_t budget = 20000, int reps = 8) {
  QuadPolicy p;
  p.budget = budget;
  p.replicates = reps;
  return p;
}

const auto kOne = [](const Point&, const Dims&) { return 1.0; };

// Plain Monte Carlo oracle for int_{B_1} (1 - rho^2)^alpha psi, independent
// of the Sobol machinery.
struct McEstimate {
  double value;
  double stderr_;
};

McEstimate mc_weighted(double alpha, std::uint64_t seed, int n, const Dims& d) {
  Rng rng(seed);
  const BallBox box = ball_box(1.0, d);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    Point p;
    p.z = ZVec(d.m);
    p.t = TVec(d.k);
    for (int c = 0; c < d.m; ++c) p.z[c] = rng.uniform(-box.z_half, box.z_half);
    for (int c = 0; c < d.k; ++c) p.t[c] = rng.uniform(-box.t_half, box.t_half);
    const double r2 = gauge_sq(p, d);
    const double v = r2 < 1.0 ? std::pow(1.0 - r2, alpha) * angle_psi_or_zero(p, d) : 0.0;
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = (sumsq / n - mean * mean) / n;
  return {box.volume(d) * mean, box.volume(d) * std::sqrt(std::max(var, 0.0))};
}

}  // namespace

TEST_CASE("omega = int_{B_1} psi against the plain Monte Carlo oracle") {
  const Dims& d = kDefault;
  const auto q1 = integrate_ball(kOne, 1.0, WeightSpec(0.0, WeightSpec::Factor::psi),
                                 identity_field(), test_policy(50000, 16), 7, d);
  const auto q2 = integrate_ball(kOne, 1.0, WeightSpec(0.0, WeightSpec::Factor::psi),
                                 identity_field(), test_policy(50000, 16), 8, d);
  CHECK_FALSE(q1.inconclusive);
  CHECK(q1.evaluations == 800000);

  // two independent seeds agree within 3 combined standard errors
  CHECK(std::abs(q1.value - q2.value) <= 3.0 * std::sqrt(q1.err_est * q1.err_est + q2.err_est * q2.err_est) + 1e-12);

  const auto mc = mc_weighted(0.0, 99, 400000, d);
  CHECK(std::abs(q1.value - mc.value) <= 3.0 * std::sqrt(mc.stderr_ * mc.stderr_ + q1.err_est * q1.err_est));

  // closed form for (m,k,beta) = (2,1,1): omega = pi/2
  CHECK(q1.value == Catch::Approx(M_PI / 2.0).epsilon(1e-3));
}

TEST_CASE("dilation scaling law value(r) = r^{Q+2 alpha} value(1)") {
  const Dims& d = kDefault;
  const WeightSpec w(1.0, WeightSpec::Factor::psi);
  const auto v1 = integrate_ball(kOne, 1.0, w, identity_field(), test_policy(), 4, d);
  const auto vh = integrate_ball(kOne, 0.5, w, identity_field(), test_policy(), 4, d);
  CHECK(vh.value / v1.value == Catch::Approx(std::pow(0.5, d.q() + 2.0)).epsilon(1e-3));
}

TEST_CASE("odd integrands vanish within the error estimate") {
  const Dims& d = kDefault;
  const auto q = integrate_ball([](const Point& p, const Dims&) { return p.z[0]; }, 0.8,
                                WeightSpec(1.0, WeightSpec::Factor::psi), identity_field(),
                                test_policy(), 21, d);
  CHECK(std::abs(q.value) <= 3.0 * q.err_est + 1e-12);
}

TEST_CASE("weight degeneracy across alpha against the radial co-area oracle") {
  const Dims& d = kDefault;
  // int_{B_1} (1-rho^2)^alpha psi = omega Q int_0^1 (1-s^2)^alpha s^{Q-1} ds,
  // which for Q = 4 collapses to pi/((alpha+1)(alpha+2)).
  std::map<int, double> vals;
  for (int alpha : {1, 2, 5}) {
    const auto q = integrate_ball(kOne, 1.0, WeightSpec(alpha, WeightSpec::Factor::psi),
                                  identity_field(), test_policy(50000, 16), 31, d);
    vals[alpha] = q.value;
    CHECK(q.value == Catch::Approx(M_PI / ((alpha + 1.0) * (alpha + 2.0))).epsilon(1e-3));
  }
  // empirical 1-d check: sample the psi-weighted rho-distribution and
  // integrate (1-rho^2)^alpha against it
  for (int alpha : {2, 5}) {
    const auto mc_a = mc_weighted(alpha, 55, 400000, d);
    const auto mc_1 = mc_weighted(1.0, 55, 400000, d);
    CHECK(vals[alpha] / vals[1] == Catch::Approx(mc_a.value / mc_1.value).epsilon(0.01));
  }
}

TEST_CASE("bit-identical results regardless of worker count") {
  const Dims& d = kDefault;
  const auto run = [&] {
    return integrate_ball(kOne, 0.9, WeightSpec(2.0, WeightSpec::Factor::mu), identity_field(),
                          test_policy(), 77, d);
  };
  setenv("BGLAB_WORKERS", "1", 1);
  const auto a = run();
  setenv("BGLAB_WORKERS", "4", 1);
  const auto b = run();
  unsetenv("BGLAB_WORKERS");
  CHECK(a.value == b.value);
  CHECK(a.err_est == b.err_est);
}

TEST_CASE("refinement by 4x stays within 3 error estimates") {
  const Dims& d = kDefault;
  const auto u = manufactured(SolutionKind::gaussian_radial, {}, d);
  auto f = [&u](const Point& p, const Dims& dd) { return u(p, dd) * u(p, dd); };
  const auto coarse = integrate_ball(f, 0.7, WeightSpec(1.0, WeightSpec::Factor::mu),
                                     identity_field(), test_policy(10000, 8), 13, d);
  const auto fine = integrate_ball(f, 0.7, WeightSpec(1.0, WeightSpec::Factor::mu),
                                   identity_field(), test_policy(40000, 8), 13, d);
  CHECK(std::abs(coarse.value - fine.value) < 3.0 * coarse.err_est);
}

TEST_CASE("monotone in the radius for nonnegative integrands") {
  const Dims& d = kDefault;
  const auto u = manufactured(SolutionKind::gaussian_radial, {}, d);
  auto f = [&u](const Point& p, const Dims& dd) { return u(p, dd) * u(p, dd); };
  double prev = 0.0, prev_err = 0.0;
  for (double r : {0.2, 0.4, 0.6, 0.8}) {
    const auto q = integrate_ball(f, r, WeightSpec(1.0, WeightSpec::Factor::mu), identity_field(),
                                  test_policy(), 3, d);
    CHECK(q.value >= prev - 3.0 * (q.err_est + prev_err));
    prev = q.value;
    prev_err = q.err_est;
  }
}

TEST_CASE("budget exhaustion is flagged, not silently answered") {
  const Dims& d = kDefault;
  // a near-singular spike keeps the replicate spread above tolerance
  const auto q = integrate_ball(
      [](const Point& p, const Dims& dd) {
        const double r2 = gauge_sq(p, dd);
        return 1.0 / (1e-7 + r2 * r2 * r2);
      },
      1.0, WeightSpec(0.0, WeightSpec::Factor::none), identity_field(), test_policy(1000, 4), 5, d);
  CHECK(q.inconclusive);
}

TEST_CASE("sup on gauge balls") {
  const Dims& d = kDefault;
  const auto uz = manufactured(SolutionKind::coordinate_z, {}, d);
  CHECK(sup_on_ball(uz, 0.5, 4000, 11, d) == Catch::Approx(0.5).margin(1e-3));

  const auto ut = manufactured(SolutionKind::coordinate_t, {}, d);
  // max of |t_1| on B_1 is 1/(beta+1)
  CHECK(sup_on_ball(ut, 1.0, 4000, 11, d) == Catch::Approx(0.5).margin(1e-3));

  SolutionField uc("const", ScalarField([](const Point&, const Dims&) { return -0.75; }),
                   std::nullopt, std::nullopt, 0.75);
  CHECK(sup_on_ball(uc, 0.3, 100, 11, d) == 0.75);

  // certified lower bound: never exceeds the true sup
  const auto ugr = manufactured(SolutionKind::gaussian_radial, {}, d);
  CHECK(sup_on_ball(ugr, 0.4, 2000, 11, d) <= 1.0);
  CHECK(sup_on_ball(ugr, 0.4, 2000, 11, d) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("sobol sequence fills dyadic boxes evenly") {
  SobolSequence s(3);
  // the first 2^k points of a Sobol net place exactly one point in each
  // dyadic column of width 2^-k
  std::array<int, 16> bins{};
  std::array<double, 3> u{};
  for (int i = 0; i < 16; ++i) {
    s.next(u.data());
    ++bins[static_cast<std::size_t>(u[0] * 16.0)];
  }
  for (int b : bins) CHECK(b == 1);
}
