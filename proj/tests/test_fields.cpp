#include <catch2/catch_amalgamated.hpp>

#include "grushin/fields.hpp"
#include "grushin/solutions.hpp"

using namespace grushin;

namespace {

const Dims kDefault(2, 1, 1.0);

Point sample_off_collar(Rng& rng, const Dims& d, double collar = 1e-3, double r = 1.0) {
  const BallBox box = ball_box(r, d);
  for (;;) {
    Point p;
    p.z = ZVec(d.m);
    p.t = TVec(d.k);
    for (int i = 0; i < d.m; ++i) p.z[i] = rng.uniform(-box.z_half, box.z_half);
    for (int j = 0; j < d.k; ++j) p.t[j] = rng.uniform(-box.t_half, box.t_half);
    if (gauge(p, d) < r && !in_characteristic_collar(p, d, collar)) return p;
  }
}

// Coordinate components of F as a vector field (the t-slots carry |z|^beta).
std::vector<double> f_coordinate_components(const CoefficientField& A, const Point& p,
                                            const Dims& d) {
  const double rho = gauge(p, d);
  const double mu = eval_mu(A, p, d);
  const HorizontalVector xr = gauge_xgrad(p, d);
  const HorizontalVector ax = A.is_identity() ? xr : A.evaluate(p, d).apply(xr);
  const double zb = std::pow(p.z.norm(), d.beta);
  std::vector<double> out(static_cast<std::size_t>(d.n()));
  for (int i = 0; i < d.m; ++i) out[static_cast<std::size_t>(i)] = rho / mu * ax[i];
  for (int j = 0; j < d.k; ++j) out[static_cast<std::size_t>(d.m + j)] = zb * rho / mu * ax[d.m + j];
  return out;
}

double fd_divergence_of_F(const CoefficientField& A, const Point& p, const Dims& d, double h) {
  double div = 0.0;
  for (int i = 0; i < d.m; ++i)
    div += fd_derivative(
        [&](double s) {
          Point q = p;
          q.z[i] += s;
          return f_coordinate_components(A, q, d)[static_cast<std::size_t>(i)];
        },
        h);
  for (int j = 0; j < d.k; ++j)
    div += fd_derivative(
        [&](double s) {
          Point q = p;
          q.t[j] += s;
          return f_coordinate_components(A, q, d)[static_cast<std::size_t>(d.m + j)];
        },
        h);
  return div;
}

}  // namespace

TEST_CASE("mu: identity reduction, characteristic limit, rank-one oracle") {
  const Dims& d = kDefault;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point p = sample_off_collar(rng, d);
    CHECK(eval_mu(identity_field(), p, d) == Catch::Approx(angle_psi(p, d)));
  }
  // limit onto {z = 0}
  CHECK(eval_mu(identity_field(), make_point({0, 0}, {0.5}), d) == 0.0);
  CHECK_THROWS_AS(eval_mu(identity_field(), Point::zero(d), d), std::domain_error);

  // A = I + 0.1 e e^T with e = X rho/|X rho| gives mu = 1.1 psi at the point
  const Point p0 = make_point({0.4, 0.2}, {0.1});
  const HorizontalVector xr = gauge_xgrad(p0, d);
  const double psi0 = angle_psi(p0, d);
  auto rank_one = CoefficientField::make_custom(
      "rank_one",
      [xr, psi0](const Point&, const Dims& dd) {
        Mat a = Mat::identity(dd.n());
        for (int i = 0; i < dd.n(); ++i)
          for (int j = 0; j < dd.n(); ++j) a(i, j) += 0.1 * xr[i] * xr[j] / psi0;
        return a;
      },
      nullptr, nullptr, 0.9, 1.0);
  CHECK(eval_mu(rank_one, p0, d) == Catch::Approx(1.1 * psi0).epsilon(1e-12));
  CHECK(eval_sigma(rank_one, p0, d) == Catch::Approx(0.1 * psi0).epsilon(1e-12));
}

TEST_CASE("sigma = mu - psi as an algebraic identity") {
  const Dims& d = kDefault;
  const auto A = make_perturbed(0.05, ones_matrix(d.n()), d);
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Point p = sample_off_collar(rng, d);
    const double mu = eval_mu(A, p, d);
    const double psi = angle_psi(p, d);
    const double sigma = eval_sigma(A, p, d);
    CHECK(sigma == Catch::Approx(mu - psi).margin(1e-12));
    CHECK(eval_sigma(identity_field(), p, d) == 0.0);
  }
}

TEST_CASE("cancelled form matches the direct sigma and g away from the collar") {
  const Dims& d = kDefault;
  const auto A = make_perturbed(0.05, ones_matrix(d.n()), d);
  Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    const Point p = sample_off_collar(rng, d, 1e-2);
    const double psi = angle_psi(p, d);
    const double rho = gauge(p, d);
    const auto c = A.cancelled_form(p, d);
    CHECK(c.sigma_tilde * psi == Catch::Approx(eval_sigma(A, p, d)).margin(1e-13));
    const HorizontalVector xr = gauge_xgrad(p, d);
    Mat b = A.evaluate(p, d);
    for (int k = 0; k < b.n; ++k) b(k, k) -= 1.0;
    for (int j = 0; j < d.n(); ++j) {
      double direct = 0.0;
      for (int k = 0; k < d.n(); ++k) direct += b(k, j) * xr[k];
      CHECK(c.g[j] * psi / rho == Catch::Approx(direct).margin(1e-13));
    }
  }
}

TEST_CASE("F reduces to the Euler field for the identity matrix") {
  const Dims& d = kDefault;
  const auto u = manufactured(SolutionKind::gaussian_modulated,
                              SolutionParams{3, SolutionKind::planar_harmonic}, d);
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Point p = sample_off_collar(rng, d);
    const double f = F_apply(identity_field(), u.field(), p, d);
    const double z = euler_apply(u.field(), p, d);
    worst = std::max(worst, std::abs(f - z));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("F rho = rho, both branches") {
  const Dims& d = kDefault;
  const auto A = make_perturbed(0.05, ones_matrix(d.n()), d);
  const ScalarField rho = make_gauge_field(d);
  Rng rng(13);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Point p = sample_off_collar(rng, d);
    worst = std::max(worst, std::abs(F_apply(A, rho, p, d) - gauge(p, d)));
  }
  // decomposition branch: points deep inside the characteristic collar
  for (int i = 0; i < 200; ++i) {
    Point p = sample_off_collar(rng, d);
    for (int c = 0; c < d.m; ++c) p.z[c] *= 1e-4;
    if (gauge(p, d) < 1e-6) continue;
    REQUIRE(angle_psi(p, d) < kPsiSwitch);
    worst = std::max(worst, std::abs(F_apply(A, rho, p, d) - gauge(p, d)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("F branches agree near the switch and extend across {z = 0}") {
  const Dims& d = kDefault;
  const auto A = make_perturbed(0.05, ones_matrix(d.n()), d);
  const auto u = manufactured(SolutionKind::gaussian_radial, {}, d);
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    Point p = sample_off_collar(rng, d);
    // scale z so that psi straddles the switch threshold
    const double target = kPsiSwitch * rng.uniform(0.5, 2.0);
    const double scale = std::sqrt(target / angle_psi(p, d));
    for (int c = 0; c < d.m; ++c) p.z[c] *= scale;
    const CoordGrad g = u.field().grad(p, d);
    const double direct = [&] {
      const double rho = gauge(p, d);
      const double mu = eval_mu(A, p, d);
      const HorizontalVector xr = gauge_xgrad(p, d);
      const HorizontalVector ax = A.evaluate(p, d).apply(xr);
      return rho / mu * dot(ax, xgrad_from_coord(g, p, d));
    }();
    const double decomposed = [&] {
      const auto c = A.cancelled_form(p, d);
      double zf = 0.0;
      for (int a = 0; a < d.m; ++a) zf += p.z[a] * g.dz[a];
      for (int b = 0; b < d.k; ++b) zf += (d.beta + 1.0) * p.t[b] * g.dt[b];
      return (zf + dot(c.g, xgrad_from_coord(g, p, d))) / (1.0 + c.sigma_tilde);
    }();
    CHECK(direct == Catch::Approx(decomposed).margin(1e-10));
  }
  // exactly on the characteristic set the decomposition reduces to Z
  const Point on_m = make_point({0, 0}, {0.3});
  const double f_on_m = F_apply(A, u.field(), on_m, d);
  CHECK(f_on_m == Catch::Approx(euler_apply(u.field(), on_m, d)).margin(1e-12));
}

TEST_CASE("violating family triggers a conditioning error near {z = 0}") {
  const Dims& d = kDefault;
  const auto bad = make_tblock_violator(0.05, d);
  const auto u = manufactured(SolutionKind::gaussian_radial, {}, d);
  const Point near_m = make_point({1e-5, 0}, {0.3});
  REQUIRE(angle_psi(near_m, d) < kPsiSwitch);
  CHECK_THROWS_AS(F_apply(bad, u.field(), near_m, d), ConditioningError);
  // away from the characteristic set the direct quotient is fine
  const Point far = make_point({0.5, 0.1}, {0.1});
  CHECK_NOTHROW(F_apply(bad, u.field(), far, d));
}

TEST_CASE("hypothesis checker: identity, perturbed family, monotonicity in eps") {
  const Dims& d = kDefault;

  const auto rep_id = check_structural(identity_field(), 1.0, 500, 42, d);
  CHECK(rep_id.lambda_hat == 0.0);
  CHECK(rep_id.stable);
  CHECK(rep_id.structural_ok);
  CHECK(rep_id.pass);

  const auto A = make_perturbed(0.05, ones_matrix(d.n()), d);
  const auto rep = check_structural(A, 1.0, 1000, 42, d);
  CHECK(rep.structural_ok);
  CHECK(rep.stable);
  CHECK_FALSE(rep.diverging);
  CHECK(rep.lambda_hat <= 10.0 * 0.05);
  CHECK(rep.lambda_hat > 0.0);
  CHECK(rep.pass);  // budget 1
  CHECK(rep.eig_min >= 0.8);

  const auto rep2 = check_structural(make_perturbed(0.10, ones_matrix(d.n()), d), 1.0, 1000, 42, d);
  CHECK(rep2.lambda_hat >= rep.lambda_hat);

  // refinement stability within 5% between the last two levels
  CHECK(std::abs(rep.levels[2] - rep.levels[1]) <= 0.05 * rep.levels[2]);
}

TEST_CASE("hypothesis checker rejects the t-block violator") {
  const Dims& d = kDefault;
  const auto bad = make_tblock_violator(0.05, d);
  const auto rep = check_structural(bad, 1.0, 2000, 42, d);
  CHECK(rep.diverging);
  CHECK_FALSE(rep.pass);
  CHECK(rep.decade_growth >= 5.0);  // exact rate is 10^{1/2+1/(2 beta)} = 10
}

TEST_CASE("perturbed family construction contracts") {
  const Dims& d = kDefault;
  // eps = 0 gives B = 0
  const auto rep0 = check_structural(make_perturbed(0.0, ones_matrix(d.n()), d), 1.0, 400, 9, d);
  CHECK(rep0.lambda_hat == 0.0);

  // A(0,0) = I for any eps
  const auto A = make_perturbed(0.05, ones_matrix(d.n()), d);
  const Mat a0 = A.evaluate(Point::zero(d), d);
  for (int i = 0; i < d.n(); ++i)
    for (int j = 0; j < d.n(); ++j) CHECK(a0(i, j) == (i == j ? 1.0 : 0.0));

  CHECK_THROWS_AS(make_perturbed(0.4, ones_matrix(d.n()), d), std::invalid_argument);
}

TEST_CASE("potential certification oracles") {
  const Dims& d = kDefault;
  const double q = d.q();

  const auto rep0 = check_potential(Potential::zero(), identity_field(), 1.0, 1000, 4, d);
  CHECK(rep0.k_hat == 1.0);
  CHECK(rep0.stable);

  // V = (rho^2 - Q) psi on B_1, Q = 4: sup |V|/psi = 4 (at the origin),
  // sup |Z V|/psi = 2 rho^2 = 2, so K = 4.
  const auto u_gr = manufactured(SolutionKind::gaussian_radial, {}, d);
  const auto rep_gr = check_potential(*u_gr.exact_potential(), identity_field(), 1.0, 2000, 4, d);
  CHECK(rep_gr.k_hat == Catch::Approx(q).epsilon(0.01));
  CHECK(rep_gr.stable);
  CHECK_FALSE(rep_gr.failed);
  CHECK(u_gr.exact_potential()->k_bound() == Catch::Approx(q));

  // V = (rho^2 - Q - 2p) psi, p = 3: the symbolic max of |rho^2 - 10| on
  // 0 <= rho <= 1 is 10, attained at the origin, so K = Q + 2p = 10.
  const auto u_ph = manufactured(SolutionKind::gaussian_modulated,
                                 SolutionParams{3, SolutionKind::planar_harmonic}, d);
  const auto rep_ph = check_potential(*u_ph.exact_potential(), identity_field(), 1.0, 2000, 4, d);
  CHECK(rep_ph.k_hat == Catch::Approx(q + 6.0).epsilon(0.01));
  CHECK(u_ph.exact_potential()->k_bound() == Catch::Approx(q + 6.0));
}

TEST_CASE("structural estimate suite with fitted constants") {
  const Dims& d = kDefault;
  const double inv2b = 1.0 / (2.0 * d.beta);
  double c_div = 0.0, c_fmu = 0.0, c_fz = 0.0, c_sigma = 0.0, c_ratio = 0.0;
  for (double eps : {0.01, 0.03, 0.05}) {
    const auto A = make_perturbed(eps, ones_matrix(d.n()), d);
    const ScalarField mu_field(
        [&A](const Point& q, const Dims& dd) { return q.z.norm() == 0.0 ? 0.0 : eval_mu(A, q, dd); });
    Rng rng(101);
    for (int i = 0; i < 2000; ++i) {
      const Point p = sample_off_collar(rng, d, 1e-2, 0.9);
      const double rho = gauge(p, d);
      const double psi = angle_psi(p, d);

      c_div = std::max(c_div, std::abs(d.q() - fd_divergence_of_F(A, p, d, 1e-4)) / rho);
      c_fmu = std::max(c_fmu, std::abs(F_apply(A, mu_field, p, d)) / (rho * psi));

      const auto fc = f_coordinate_components(A, p, d);
      double comp = 0.0;
      for (int c = 0; c < d.m; ++c) comp = std::max(comp, std::abs(fc[static_cast<std::size_t>(c)] - p.z[c]));
      for (int c = 0; c < d.k; ++c)
        comp = std::max(comp,
                        std::abs(fc[static_cast<std::size_t>(d.m + c)] - (d.beta + 1.0) * p.t[c]));
      c_fz = std::max(c_fz, comp / (rho * rho));

      const double sigma = eval_sigma(A, p, d);
      c_sigma = std::max(c_sigma, std::abs(sigma) / (rho * std::pow(psi, 1.5 + inv2b)));
      c_ratio = std::max(c_ratio, std::abs(sigma / eval_mu(A, p, d)) / (rho * psi));
    }
  }
  CHECK(c_div <= 100.0);
  CHECK(c_fmu <= 100.0);
  CHECK(c_fz <= 100.0);
  CHECK(c_sigma <= 100.0);
  CHECK(c_ratio <= 100.0);
  // the comparison mu ~ psi from the same sweep
  const auto A = make_perturbed(0.05, ones_matrix(d.n()), d);
  Rng rng(103);
  for (int i = 0; i < 500; ++i) {
    const Point p = sample_off_collar(rng, d);
    const double mu = eval_mu(A, p, d), psi = angle_psi(p, d);
    CHECK(mu >= A.lambda() * psi * (1.0 - 1e-12));
    CHECK(mu <= psi / A.lambda() * (1.0 + 1e-12));
  }
}
