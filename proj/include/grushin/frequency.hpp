#pragma once

#include <optional>
#include <vector>

#include "grushin/core.hpp"
#include "grushin/fields.hpp"
#include "grushin/geometry.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/solutions.hpp"

// The frequency machinery.  For a solution u, coefficient field A and
// potential V on B_{R1}:
//
//   H(r) = int_{B_r} u^2 (r^2-rho^2)^alpha mu                       (height)
//   I(r) = int_{B_r} <A Xu, Xu> (r^2-rho^2)^{alpha+1} + V u^2 (...)  (energy)
//        = 2(alpha+1) int_{B_r} u Fu (r^2-rho^2)^alpha mu            (flux form)
//   N(r) = I(r) / H(r)                                               (frequency)
//   h(r) = int_{B_r} u^2 mu
//
// together with the first-variation residuals
//
//   H'(r) = (2 alpha + Q)/r H + O(1) H + I / ((alpha+1) r)
//   I'(r) = (2 alpha + Q)/r I + 4(alpha+1)/r int (Fu)^2 (r^2-rho^2)^alpha mu
//           + O(1) I + O(1) K r H,
//
// the adjusted-frequency monotonicity of e^{C1 r}(N + C2 K r^2), the
// three-ball inequality for h, and the vanishing-order fit of sup |u| on
// shrinking balls.  All universal constants are treated as fit parameters on
// bounded grids: acceptance means existence of constants, never specific
// values.

namespace grushin {

struct FrequencyConfig {
  std::optional<double> alpha;  // nullopt: use sqrt(K)
  std::vector<double> radii;    // strictly increasing, inside (0, R1]
  double r1 = 1.0;              // working radius R1 <= 1
  double k_const = 1.0;         // certified potential constant K >= 1
  QuadPolicy quad;
  std::size_t sup_samples = 4000;
  std::uint64_t seed = 1;
  double adj_c1 = 0.0;  // constants used for the N_adjusted profile column
  double adj_c2 = 0.0;

  double resolved_alpha() const { return alpha ? *alpha : std::sqrt(k_const); }

  void validate() const {
    if (!(r1 > 0.0 && r1 <= 1.0)) throw std::invalid_argument("FrequencyConfig: need 0 < R1 <= 1");
    if (!(k_const >= 1.0)) throw std::invalid_argument("FrequencyConfig: need K >= 1");
    if (radii.empty()) throw std::invalid_argument("FrequencyConfig: empty radius grid");
    double prev = 0.0;
    for (double r : radii) {
      if (!(r > prev) || r > r1 + 1e-12)
        throw std::invalid_argument("FrequencyConfig: radii must increase inside (0, R1]");
      prev = r;
    }
    if (alpha && !(*alpha >= 0.0))
      throw std::invalid_argument("FrequencyConfig: alpha must be >= 0");
  }
};

inline std::vector<double> geometric_radii(double r_min, double r_max, std::size_t count) {
  if (!(r_min > 0.0 && r_max > r_min) || count < 2)
    throw std::invalid_argument("geometric_radii: bad range");
  std::vector<double> rs(count);
  const double step = std::log(r_max / r_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    rs[i] = r_min * std::exp(step * static_cast<double>(i));
  rs.back() = r_max;
  return rs;
}

struct ProfileRow {
  double r = 0.0;
  double H = 0.0, H_err = 0.0;
  double I_energy = 0.0, I_flux = 0.0, I_err = 0.0;
  double fu_sq = 0.0;        // int (Fu)^2 (r^2-rho^2)^alpha mu
  double N = 0.0;            // I_energy / H
  double N_adjusted = 0.0;   // e^{c1 r} (N + c2 K r^2)
  double h = 0.0;            // int u^2 mu
  double sup_u = 0.0;
  double cs_slack = 0.0;     // 4(alpha+1)^2 H fu_sq - I_flux^2 (>= 0 up to rounding)
  bool degenerate = false;   // H indistinguishable from quadrature noise
  bool flux_mismatch = false;  // |I_energy - I_flux| > 3 combined err
};

struct RadialProfile {
  std::vector<ProfileRow> rows;
  double alpha = 0.0;
  double k_const = 1.0;
  double q_dim = 0.0;
};

namespace detail {

// One pass over the shared point set at radius r: all row integrals at once.
// Estimates indices: 0 H, 1 I_main, 2 I_pot, 3 I_flux, 4 fu_sq, 5 h.
inline ProfileRow profile_row(const SolutionField& u, const CoefficientField& A,
                              const Potential& V, const BallSampler& sampler, double r,
                              double alpha, const Dims& d) {
  const bool identity = A.is_identity();
  const bool vzero = V.is_zero();
  const double ap1 = alpha + 1.0;

  auto est = sampler.replicate_estimates(6, [&](const Point& y, double rho2, double psi, double* out) {
    if (psi == 0.0) {  // measure-zero characteristic samples contribute nothing
      for (int j = 0; j < 6; ++j) out[j] = 0.0;
      return;
    }
    const Point x = dilate(y, r, d);
    const double uv = u(x, d);
    const CoordGrad g = u.field().has_grad() ? u.field().grad(x, d)
                                             : coord_grad_fd(u.field(), x, d, fd_step(x, d));
    const HorizontalVector xu = xgrad_from_coord(g, x, d);
    const double mu = identity ? psi : eval_mu(A, x, d);
    const double fu = F_apply_from_grad(A, g, x, d);
    const double w_a = alpha == 0.0 ? 1.0 : std::pow(1.0 - rho2, alpha);
    const double w_a1 = w_a * (1.0 - rho2);
    const double axuxu = identity ? xu.norm_sq() : A.evaluate(x, d).quad_form(xu);
    out[0] = uv * uv * w_a * mu;
    out[1] = axuxu * w_a1;
    out[2] = vzero ? 0.0 : V(x, d) * uv * uv * w_a1;
    out[3] = 2.0 * ap1 * uv * fu * w_a * mu;
    out[4] = fu * fu * w_a * mu;
    out[5] = uv * uv * mu;
  });

  // Combine per replicate in physical units; energy and flux share the point
  // set, so their agreement is judged by the spread of the per-replicate
  // difference, not by adding independent errors.
  const double q = d.q();
  const double s_a = std::pow(r, q + 2.0 * alpha);
  const double s_a1 = std::pow(r, q + 2.0 * alpha + 2.0);
  const double s_0 = std::pow(r, q);
  std::vector<std::vector<double>> derived(est.size(), std::vector<double>(6, 0.0));
  for (std::size_t rep = 0; rep < est.size(); ++rep) {
    derived[rep][0] = s_a * est[rep][0];                       // H
    derived[rep][1] = s_a1 * (est[rep][1] + est[rep][2]);      // I_energy
    derived[rep][2] = s_a * est[rep][3];                       // I_flux
    derived[rep][3] = s_a * est[rep][4];                       // fu_sq
    derived[rep][4] = derived[rep][1] - derived[rep][2];       // energy - flux
    derived[rep][5] = s_0 * est[rep][5];                       // h
  }
  const auto c = BallSampler::combine(derived);

  ProfileRow row;
  row.r = r;
  row.H = c.value[0];
  row.H_err = c.err[0];
  row.I_energy = c.value[1];
  row.I_flux = c.value[2];
  row.I_err = std::max(c.err[1], c.err[4]);
  row.fu_sq = c.value[3];
  row.h = c.value[5];
  row.degenerate = !(row.H > 0.0) || row.H <= 3.0 * row.H_err;
  row.N = row.degenerate ? 0.0 : row.I_energy / row.H;
  row.flux_mismatch = std::abs(c.value[4]) > 3.0 * c.err[4] && !row.degenerate;
  row.cs_slack = 4.0 * ap1 * ap1 * row.H * row.fu_sq - row.I_flux * row.I_flux;
  return row;
}

}  // namespace detail

inline QuadResult height_H(const SolutionField& u, const CoefficientField& A, double r,
                           double alpha, const QuadPolicy& policy, std::uint64_t seed,
                           const Dims& d) {
  return integrate_ball([&u](const Point& x, const Dims& dd) { return u(x, dd) * u(x, dd); }, r,
                        WeightSpec(alpha, WeightSpec::Factor::mu), A, policy, seed, d);
}

inline QuadResult energy_I(const SolutionField& u, const CoefficientField& A, const Potential& V,
                           double r, double alpha, const QuadPolicy& policy, std::uint64_t seed,
                           const Dims& d) {
  const bool identity = A.is_identity();
  auto f = [&](const Point& x, const Dims& dd) {
    const HorizontalVector xu = u.xgrad(x, dd);
    const double main = identity ? xu.norm_sq() : A.evaluate(x, dd).quad_form(xu);
    return main + V(x, dd) * u(x, dd) * u(x, dd);
  };
  return integrate_ball(f, r, WeightSpec(alpha + 1.0, WeightSpec::Factor::none), A, policy, seed, d);
}

inline QuadResult flux_I(const SolutionField& u, const CoefficientField& A, double r, double alpha,
                         const QuadPolicy& policy, std::uint64_t seed, const Dims& d) {
  auto f = [&](const Point& x, const Dims& dd) {
    if (x.is_origin()) return 0.0;
    const CoordGrad g = u.field().has_grad() ? u.field().grad(x, dd)
                                             : coord_grad_fd(u.field(), x, dd, fd_step(x, dd));
    return 2.0 * (alpha + 1.0) * u(x, dd) * F_apply_from_grad(A, g, x, dd);
  };
  return integrate_ball(f, r, WeightSpec(alpha, WeightSpec::Factor::mu), A, policy, seed, d);
}

// N(r) = I_energy / H with a flux/energy consistency diagnostic.
struct FrequencyValue {
  double n = 0.0;
  double i_energy = 0.0;
  double i_flux = 0.0;
  double h_height = 0.0;
  bool flux_mismatch = false;
};

inline FrequencyValue frequency_N(const SolutionField& u, const CoefficientField& A,
                                  const Potential& V, double r, double alpha,
                                  const QuadPolicy& policy, std::uint64_t seed, const Dims& d) {
  BallSampler sampler(d, policy.budget, policy.replicates, seed);
  const ProfileRow row = detail::profile_row(u, A, V, sampler, r, alpha, d);
  if (row.degenerate) throw std::runtime_error("frequency_N: height below quadrature noise floor");
  FrequencyValue v;
  v.n = row.N;
  v.i_energy = row.I_energy;
  v.i_flux = row.I_flux;
  v.h_height = row.H;
  v.flux_mismatch = row.flux_mismatch;
  return v;
}

// Full profile: every radius shares the same point set.
inline RadialProfile radial_profile(const SolutionField& u, const CoefficientField& A,
                                    const Potential& V, const FrequencyConfig& cfg, const Dims& d) {
  cfg.validate();
  const double alpha = cfg.resolved_alpha();
  BallSampler sampler(d, cfg.quad.budget, cfg.quad.replicates, cfg.seed);
  RadialProfile profile;
  profile.alpha = alpha;
  profile.k_const = cfg.k_const;
  profile.q_dim = d.q();
  profile.rows.reserve(cfg.radii.size());
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
    ProfileRow row = detail::profile_row(u, A, V, sampler, cfg.radii[i], alpha, d);
    row.sup_u = sup_on_ball(u, cfg.radii[i], cfg.sup_samples, cfg.seed ^ (0x51ULL + i), d);
    row.N_adjusted = std::exp(cfg.adj_c1 * row.r) *
                     (row.N + cfg.adj_c2 * cfg.k_const * row.r * row.r);
    profile.rows.push_back(row);
  }
  return profile;
}

// ---------------------------------------------------------------------------
// First-variation residuals.
// ---------------------------------------------------------------------------

struct VariationRow {
  double r = 0.0;
  double res_h_rel = 0.0;  // |H' - (2a+Q)H/r - I/((a+1)r)| / H
  double res_i_rel = 0.0;  // |I' - (2a+Q)I/r - 4(a+1)/r fu_sq| / |I|
  double res_i_abs = 0.0;
  double slack_scale = 0.0;  // |I| + K r H, the O(1) budget of the identity
};

struct VariationReport {
  std::vector<VariationRow> rows;
  double max_res_h_rel = 0.0;
  double max_res_i_rel = 0.0;
  bool noisy = false;  // differentiation noise dominates the residual scale
};

// Residuals of the two first-variation identities on the interior of a
// geometric radius grid; radial derivatives are 5-point central differences
// in log r.
inline VariationReport variation_residuals(const RadialProfile& profile, double k_const) {
  const auto& rows = profile.rows;
  if (rows.size() < 9)
    throw std::invalid_argument("variation_residuals: need at least 9 profile radii");
  const std::size_t n = rows.size();
  const double ds = std::log(rows[1].r / rows[0].r);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double step = std::log(rows[i + 1].r / rows[i].r);
    if (std::abs(step - ds) > 1e-9 * std::abs(ds))
      throw std::invalid_argument("variation_residuals: radius grid must be geometric");
  }

  const double alpha = profile.alpha;
  const double q = profile.q_dim;
  auto dlog = [&](auto&& get, std::size_t i) {
    // d/ds by 5-point central difference, then d/dr = (d/ds)/r.
    const double v = (get(i - 2) - 8.0 * get(i - 1) + 8.0 * get(i + 1) - get(i + 2)) / (12.0 * ds);
    return v / rows[i].r;
  };

  VariationReport rep;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const auto& row = rows[i];
    if (row.degenerate) continue;
    VariationRow out;
    out.r = row.r;
    const double hp = dlog([&](std::size_t j) { return rows[j].H; }, i);
    const double ip = dlog([&](std::size_t j) { return rows[j].I_energy; }, i);
    const double res_h =
        hp - (2.0 * alpha + q) / row.r * row.H - row.I_energy / ((alpha + 1.0) * row.r);
    const double res_i = ip - (2.0 * alpha + q) / row.r * row.I_energy -
                         4.0 * (alpha + 1.0) / row.r * row.fu_sq;
    out.res_h_rel = std::abs(res_h) / row.H;
    out.res_i_abs = std::abs(res_i);
    out.res_i_rel = row.I_energy != 0.0 ? std::abs(res_i) / std::abs(row.I_energy) : 0.0;
    out.slack_scale = std::abs(row.I_energy) + k_const * row.r * row.H;
    rep.rows.push_back(out);
    rep.max_res_h_rel = std::max(rep.max_res_h_rel, out.res_h_rel);
    rep.max_res_i_rel = std::max(rep.max_res_i_rel, out.res_i_rel);
    if (row.H_err > 0.02 * row.H || row.I_err > 0.05 * std::abs(row.I_energy)) rep.noisy = true;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Adjusted-frequency monotonicity.
// ---------------------------------------------------------------------------

struct MonotonicityReport {
  double c1_fit = 0.0;
  double c2_fit = 0.0;
  bool found = false;
  double max_violation_at_zero = 0.0;  // largest decrease of plain N between neighbors
  std::vector<double> witness_radii;   // where the best candidate still fails
};

// Smallest (C1, C2) on {0, 0.1, ..., 20}^2 (ordered by C1 + C2, then C1)
// making r -> e^{C1 r}(N(r) + C2 K r^2) nondecreasing within slack 1e-3 N.
inline MonotonicityReport monotonicity_fit(const RadialProfile& profile, double k_const) {
  const auto& rows = profile.rows;
  if (rows.size() < 2) throw std::invalid_argument("monotonicity_fit: need at least 2 radii");
  MonotonicityReport rep;

  auto adjusted = [&](std::size_t i, double c1, double c2) {
    return std::exp(c1 * rows[i].r) * (rows[i].N + c2 * k_const * rows[i].r * rows[i].r);
  };
  auto violations = [&](double c1, double c2, std::vector<double>* witness) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      if (rows[i].degenerate || rows[i + 1].degenerate) continue;
      const double drop = adjusted(i, c1, c2) - adjusted(i + 1, c1, c2);
      const double tol = 1e-3 * std::abs(rows[i].N);
      if (drop > tol) {
        worst = std::max(worst, drop);
        if (witness) witness->push_back(rows[i].r);
      }
    }
    return worst;
  };

  rep.max_violation_at_zero = violations(0.0, 0.0, nullptr);

  constexpr int kSteps = 200;  // grid 0, 0.1, ..., 20
  for (int total = 0; total <= 2 * kSteps && !rep.found; ++total) {
    for (int i1 = 0; i1 <= std::min(total, kSteps); ++i1) {
      const int i2 = total - i1;
      if (i2 > kSteps) continue;
      const double c1 = 0.1 * i1, c2 = 0.1 * i2;
      if (violations(c1, c2, nullptr) == 0.0) {
        rep.c1_fit = c1;
        rep.c2_fit = c2;
        rep.found = true;
        break;
      }
    }
  }
  if (!rep.found) violations(20.0, 20.0, &rep.witness_radii);
  return rep;
}

// Frequency comparability: smallest (Cbar, C2) on the grid with
// N(r) <= Cbar (N(s) + C2 K) for every profile pair r < s.
struct ComparisonReport {
  double cbar = 1.0;
  double c2 = 0.0;
  bool found = false;
};

inline ComparisonReport frequency_comparison_fit(const RadialProfile& profile, double k_const) {
  const auto& rows = profile.rows;
  ComparisonReport rep;
  auto ok = [&](double cbar, double c2) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        if (rows[i].degenerate || rows[j].degenerate) continue;
        if (rows[i].N > cbar * (rows[j].N + c2 * k_const) + 1e-12) return false;
      }
    return true;
  };
  for (int total = 0; total <= 400 && !rep.found; ++total) {
    for (int i1 = 0; i1 <= std::min(total, 200); ++i1) {
      const int i2 = total - i1;
      if (i2 > 200) continue;
      const double cbar = 1.0 + 0.1 * i1;
      const double c2 = 0.1 * i2;
      if (ok(cbar, c2)) {
        rep.cbar = cbar;
        rep.c2 = c2;
        rep.found = true;
        break;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Three-ball inequality.
// ---------------------------------------------------------------------------

struct ThreeBallReport {
  double h_r1 = 0.0, h_2r2 = 0.0, h_r3 = 0.0;
  double theta = 0.0;       // beta0 / (alpha0 + beta0)
  double slack_at_zero = 0.0;  // slack at C = C'' = 0
  double c_fit = 0.0;
  double cpp_fit = 0.0;
  bool pass = false;
};

// slack(C, C'') = theta log h(r3) + (1-theta) log h(r1)
//                 + C'' sqrt(K) log(r3/(2 r2)) + C - log h(2 r2),
// with alpha0 = log(r3/(2 r2)) and beta0 = Cbar^2 log(2 r2 / r1); pass means
// nonnegative slack at some grid point of [0,20]^2, reported at the smallest
// such constants.
inline ThreeBallReport three_ball_slack(const SolutionField& u, const CoefficientField& A,
                                        double r1, double r2, double r3, double k_const,
                                        double cbar, const QuadPolicy& policy, std::uint64_t seed,
                                        const Dims& d, double big_r1 = 1.0) {
  if (!(0.0 < r1 && r1 < r2 && 2.0 * r2 < r3 && r3 <= big_r1))
    throw std::invalid_argument("three_ball_slack: need 0 < r1 < r2 < 2 r2 < r3 <= R1");
  if (!(cbar >= 1.0)) throw std::invalid_argument("three_ball_slack: need Cbar >= 1");
  if (!(k_const >= 1.0)) throw std::invalid_argument("three_ball_slack: need K >= 1");

  auto h_of = [&](double r) {
    const QuadResult q = integrate_ball(
        [&u](const Point& x, const Dims& dd) { return u(x, dd) * u(x, dd); }, r,
        WeightSpec(0.0, WeightSpec::Factor::mu), A, policy, seed, d);
    if (!(q.value > 0.0)) throw std::runtime_error("three_ball_slack: degenerate h(r)");
    return q.value;
  };

  ThreeBallReport rep;
  rep.h_r1 = h_of(r1);
  rep.h_2r2 = h_of(2.0 * r2);
  rep.h_r3 = h_of(r3);

  const double alpha0 = std::log(r3 / (2.0 * r2));
  const double beta0 = cbar * cbar * std::log(2.0 * r2 / r1);
  rep.theta = beta0 / (alpha0 + beta0);
  const double base = rep.theta * std::log(rep.h_r3) + (1.0 - rep.theta) * std::log(rep.h_r1) -
                      std::log(rep.h_2r2);
  rep.slack_at_zero = base;

  const double lg = std::sqrt(k_const) * alpha0;  // log(r3/(2 r2)) > 0
  for (int total = 0; total <= 400 && !rep.pass; ++total) {
    for (int ic = 0; ic <= std::min(total, 200); ++ic) {
      const int icpp = total - ic;
      if (icpp > 200) continue;
      const double c = 0.1 * ic, cpp = 0.1 * icpp;
      if (base + c + cpp * lg >= 0.0) {
        rep.c_fit = c;
        rep.cpp_fit = cpp;
        rep.pass = true;
        break;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Vanishing order.
// ---------------------------------------------------------------------------

struct VanishingOrderReport {
  std::vector<double> radii;
  std::vector<double> sup_values;
  double slope = 0.0;        // least-squares slope of log sup vs log r, smallest decade
  double c2_sqrt_k = 0.0;    // max pairwise chord over the same decade (>= slope)
  double c2 = 0.0;           // c2_sqrt_k / sqrt(K)
  double c1 = 0.0;           // largest prefactor keeping the bound valid on all radii
  bool unreliable = false;   // some sup fell below the noise floor
};

// Fits the decay sup_{B_r} |u| >= C1 (r/R1)^{C2 sqrt(K)}.  The least-squares
// slope is a weighted average of pairwise chords, so the max chord dominates
// it by construction.
inline VanishingOrderReport vanishing_order(const SolutionField& u, const std::vector<double>& radii,
                                            double k_const, double big_r1, std::size_t sup_samples,
                                            std::uint64_t seed, const Dims& d) {
  if (radii.size() < 3) throw std::invalid_argument("vanishing_order: need at least 3 radii");
  for (double r : radii)
    if (!(r > 0.0 && r < big_r1 / 3.0))
      throw std::invalid_argument("vanishing_order: radii must lie in (0, R1/3)");

  VanishingOrderReport rep;
  rep.radii = radii;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double s = sup_on_ball(u, radii[i], sup_samples, seed ^ (0x7eULL + i), d);
    rep.sup_values.push_back(s);
    if (s < 1e-12) rep.unreliable = true;
  }
  if (rep.unreliable) return rep;

  const double r_lo = *std::min_element(radii.begin(), radii.end());
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] <= 10.0 * r_lo * (1.0 + 1e-9)) {
      xs.push_back(std::log(radii[i]));
      ys.push_back(std::log(rep.sup_values[i]));
    }
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  rep.slope = sxy / sxx;

  double chord_max = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[j] != xs[i]) chord_max = std::max(chord_max, (ys[j] - ys[i]) / (xs[j] - xs[i]));
  rep.c2_sqrt_k = std::max(0.0, chord_max);

  rep.c2 = rep.c2_sqrt_k / std::sqrt(k_const);

  double log_c1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < radii.size(); ++i)
    log_c1 = std::min(log_c1,
                      std::log(rep.sup_values[i]) - rep.c2_sqrt_k * std::log(radii[i] / big_r1));
  rep.c1 = std::exp(log_c1);
  return rep;
}

// omega = int_{B_1} psi; with it, h(r) <= lambda^{-1} omega r^Q sup^2.
inline QuadResult omega_constant(const QuadPolicy& policy, std::uint64_t seed, const Dims& d) {
  return integrate_ball([](const Point&, const Dims&) { return 1.0; }, 1.0,
                        WeightSpec(0.0, WeightSpec::Factor::psi), identity_field(), policy, seed, d);
}

}  // namespace grushin
