#include <catch2/catch_amalgamated.hpp>

#include "grushin/solutions.hpp"

using namespace grushin;

namespace {

const Dims kDefault(2, 1, 1.0);

// Sample points keeping |z| clear of the nested-difference collar.
std::vector<Point> residual_points(std::size_t n, std::uint64_t seed, const Dims& d,
                                   double zmin = 0.02, double r = 0.9) {
  std::vector<Point> out;
  Rng rng(seed);
  const BallBox box = ball_box(r, d);
  while (out.size() < n) {
    Point p;
    p.z = ZVec(d.m);
    p.t = TVec(d.k);
    for (int i = 0; i < d.m; ++i) p.z[i] = rng.uniform(-box.z_half, box.z_half);
    for (int j = 0; j < d.k; ++j) p.t[j] = rng.uniform(-box.t_half, box.t_half);
    if (gauge(p, d) < r && p.z.norm() > zmin) out.push_back(p);
  }
  return out;
}

double max_residual(const SolutionField& u, const Dims& d, std::size_t n, std::uint64_t seed,
                    double h = 1e-3) {
  REQUIRE(u.exact_potential());
  double worst = 0.0;
  for (const auto& p : residual_points(n, seed, d)) {
    worst = std::max(worst,
                     std::abs(residual(u.field(), *u.exact_potential(), identity_field(), p, d, h)));
  }
  return worst;
}

}  // namespace

TEST_CASE("coordinate solutions are annihilated by the operator") {
  const Dims& d = kDefault;
  const auto uz = manufactured(SolutionKind::coordinate_z, {}, d);
  const auto ut = manufactured(SolutionKind::coordinate_t, {}, d);
  CHECK(uz.kappa() == 1.0);
  CHECK(ut.kappa() == d.beta + 1.0);
  CHECK(max_residual(uz, d, 200, 11) < 1e-8);
  CHECK(max_residual(ut, d, 200, 12) < 1e-8);
}

TEST_CASE("second derivative sanity: B(z1^2) = 2") {
  const Dims& d = kDefault;
  const ScalarField z1sq([](const Point& p, const Dims&) { return p.z[0] * p.z[0]; });
  for (const auto& p : residual_points(50, 13, d)) {
    CHECK(residual(z1sq, Potential::zero(), identity_field(), p, d) ==
          Catch::Approx(2.0).margin(1e-7));
  }
}

TEST_CASE("radial Gaussian: potential (rho^2 - Q) psi versus two oracles") {
  const Dims& d = kDefault;
  const auto u = manufactured(SolutionKind::gaussian_radial, {}, d);
  REQUIRE(u.exact_potential());

  // nested finite differences at 1e3 points
  CHECK(max_residual(u, d, 1000, 17) < 1e-8);

  // the radial identity B f(rho) = psi (f'' + (Q-1) f'/rho), evaluated
  // analytically for f = e^{-s^2/2}
  for (const auto& p : residual_points(200, 19, d)) {
    const double rho = gauge(p, d);
    const double psi = angle_psi(p, d);
    const double f = std::exp(-0.5 * rho * rho);
    const double fp = -rho * f;
    const double fpp = (rho * rho - 1.0) * f;
    const double via_radial = psi * (fpp + (d.q() - 1.0) * fp / rho);
    const double vu = (*u.exact_potential())(p, d) * u(p, d);
    CHECK(via_radial == Catch::Approx(vu).margin(1e-12));
  }
}

TEST_CASE("modulated Gaussians: potential shift is 2 kappa of the factor") {
  const Dims& d = kDefault;
  const double q = d.q();
  struct Case {
    SolutionKind mod;
    double kappa;
  };
  for (const Case& c : {Case{SolutionKind::coordinate_z, 1.0},
                        Case{SolutionKind::coordinate_t, d.beta + 1.0},
                        Case{SolutionKind::planar_harmonic, 3.0}}) {
    const auto u = manufactured(SolutionKind::gaussian_modulated, SolutionParams{3, c.mod}, d);
    REQUIRE(u.kappa() == c.kappa);
    REQUIRE(u.exact_potential());
    // closed form: V = (rho^2 - Q - 2 kappa) psi
    for (const auto& p : residual_points(100, 23, d)) {
      const double expect =
          (gauge_sq(p, d) - q - 2.0 * c.kappa) * angle_psi(p, d);
      CHECK((*u.exact_potential())(p, d) == Catch::Approx(expect).margin(1e-13));
    }
    CHECK(max_residual(u, d, 500, 29) < 1e-8);
  }
}

TEST_CASE("every built-in pair satisfies the equation under nested differences") {
  const Dims& d = kDefault;
  for (const auto& u : all_manufactured(d)) {
    INFO("solution: " << u.name());
    CHECK(max_residual(u, d, 300, 31) < 1e-6);
  }
}

TEST_CASE("homogeneous members satisfy Z u = kappa u") {
  const Dims& d = kDefault;
  for (const auto& u : all_manufactured(d)) {
    if (!u.exact_potential() || !u.exact_potential()->is_zero()) continue;
    REQUIRE(u.kappa());
    for (const auto& p : residual_points(300, 37, d)) {
      CHECK(euler_apply(u.field(), p, d) ==
            Catch::Approx(*u.kappa() * u(p, d)).margin(1e-8));
    }
  }
}

TEST_CASE("potential certification matches the closed-form constants") {
  const Dims& d = kDefault;
  const double q = d.q();
  struct Expect {
    SolutionKind kind;
    SolutionKind mod;
    double k;
  };
  const std::vector<Expect> expects = {
      {SolutionKind::gaussian_radial, SolutionKind::coordinate_z, q},
      {SolutionKind::gaussian_modulated, SolutionKind::coordinate_z, q + 2.0},
      {SolutionKind::gaussian_modulated, SolutionKind::coordinate_t, q + 2.0 * (d.beta + 1.0)},
      {SolutionKind::gaussian_modulated, SolutionKind::planar_harmonic, q + 6.0},
  };
  for (const auto& e : expects) {
    const auto u = manufactured(e.kind, SolutionParams{3, e.mod}, d);
    REQUIRE(u.exact_potential());
    CHECK(u.exact_potential()->k_bound() == Catch::Approx(e.k));
    const auto rep = check_potential(*u.exact_potential(), identity_field(), 1.0, 1500, 41, d);
    CHECK(rep.k_hat == Catch::Approx(e.k).epsilon(0.01));
    CHECK(rep.stable);
    CHECK_FALSE(rep.failed);
  }
}

TEST_CASE("Z V = 2 rho^2 psi for the shifted radial potentials") {
  const Dims& d = kDefault;
  const auto u = manufactured(SolutionKind::gaussian_modulated,
                              SolutionParams{3, SolutionKind::planar_harmonic}, d);
  const auto& V = *u.exact_potential();
  for (const auto& p : residual_points(300, 43, d)) {
    const double zv = F_apply(identity_field(), V.field(), p, d);
    CHECK(zv == Catch::Approx(2.0 * gauge_sq(p, d) * angle_psi(p, d)).margin(1e-9));
    CHECK(std::abs(zv) <= V.k_bound() * angle_psi(p, d) * (1.0 + 1e-9));
    CHECK(std::abs(V(p, d)) <= V.k_bound() * angle_psi(p, d) * (1.0 + 1e-9));
  }
}

TEST_CASE("sup-norm bound on the unit ball") {
  const Dims& d = kDefault;
  for (const auto& u : all_manufactured(d)) {
    for (const auto& p : residual_points(500, 47, d, 0.0, 1.0)) {
      CHECK(std::abs(u(p, d)) <= u.bound_c0() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("residual collar is enforced") {
  const Dims& d = kDefault;
  const auto u = manufactured(SolutionKind::gaussian_radial, {}, d);
  const Point close = make_point({1e-3, 0}, {0.2});
  CHECK_THROWS_AS(residual(u.field(), *u.exact_potential(), identity_field(), close, d, 1e-3),
                  std::domain_error);
}

TEST_CASE("manufactured solutions for generic dimensions") {
  const Dims d(3, 2, 1.5);
  const auto u = manufactured(SolutionKind::gaussian_radial, {}, d);
  CHECK(max_residual(u, d, 200, 53) < 1e-6);
  const auto ut = manufactured(SolutionKind::gaussian_modulated,
                               SolutionParams{3, SolutionKind::coordinate_t}, d);
  CHECK(max_residual(ut, d, 200, 59) < 1e-6);
}

TEST_CASE("invalid kinds and parameters are rejected") {
  CHECK_THROWS_AS(manufactured(SolutionKind::coordinate_t, {}, Dims(2, 0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(manufactured(SolutionKind::planar_harmonic, {}, Dims(1, 1, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(manufactured(SolutionKind::planar_harmonic, SolutionParams{0, {}}, kDefault),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      manufactured(SolutionKind::gaussian_modulated,
                   SolutionParams{3, SolutionKind::gaussian_radial}, kDefault),
      std::invalid_argument);
}
