#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <vector>

#include "grushin/core.hpp"
#include "grushin/geometry.hpp"

// Coefficient matrices A = I + B with the block-weighted structural bounds
//
//   |b_ij|     <= Lambda rho                          (1 <= i,j <= m)
//   |b_ij|     <= Lambda psi^{1/2 + 1/(2 beta)} rho   (otherwise)
//   |X_l b_ij| <= Lambda                              (l <= m and i,j <= m)
//   |X_l b_ij| <= Lambda psi^{1/2}                    (otherwise),
//
// the derived quantities mu = <A X rho, X rho> and sigma = mu - psi, and the
// coefficient-adapted radial field F f = (rho/mu) <A X rho, X f>.  F is 0/0
// on {z = 0}; below psi_switch it is evaluated through the decomposition
//
//   F f = ( Z f + sum_j g_j X_j f ) / (1 + sigma/psi),
//   g_j = (rho/psi) sum_i b_ij X_i rho,
//
// whose ingredients the built-in families supply with the psi-cancellation
// done analytically, so the extension across the characteristic set is
// stable.  When A = I both branches reduce to the Euler field Z.

namespace grushin {

inline constexpr double kPsiSwitch = 1e-4;

// sigma/psi and the cancelled vector g; enough to evaluate F near {z = 0}.
struct CancelledForm {
  double sigma_tilde = 0.0;
  HorizontalVector g;
};

class CoefficientField {
 public:
  using EvalFn = std::function<Mat(const Point&, const Dims&)>;
  using XDerivFn = std::function<Mat(int, const Point&, const Dims&)>;
  using CancelledFn = std::function<CancelledForm(const Point&, const Dims&)>;

  CoefficientField() = default;

  Mat evaluate(const Point& p, const Dims& d) const {
    if (identity_) return Mat::identity(d.n());
    return eval_(p, d);
  }

  // X_l-derivative of every entry; finite differences along the frame when
  // no closed form was registered.
  Mat xderiv(int ell, const Point& p, const Dims& d) const {
    if (identity_) return Mat(d.n());
    if (xderiv_) return xderiv_(ell, p, d);
    return xderiv_fd(ell, p, d);
  }

  bool is_identity() const { return identity_; }
  bool has_cancelled_form() const { return identity_ || static_cast<bool>(cancelled_); }

  CancelledForm cancelled_form(const Point& p, const Dims& d) const {
    if (identity_) {
      CancelledForm c;
      c.g = HorizontalVector(d.n());
      return c;
    }
    return cancelled_(p, d);
  }

  double lambda() const { return lambda_; }
  double structural_radius() const { return structural_radius_; }
  const std::string& name() const { return name_; }

  static CoefficientField make_identity() {
    CoefficientField f;
    f.identity_ = true;
    f.lambda_ = 1.0;
    f.structural_radius_ = 1.0;
    f.name_ = "identity";
    return f;
  }

  static CoefficientField make_custom(std::string name, EvalFn eval, XDerivFn xderiv,
                                      CancelledFn cancelled, double lambda,
                                      double structural_radius) {
    CoefficientField f;
    f.identity_ = false;
    f.name_ = std::move(name);
    f.eval_ = std::move(eval);
    f.xderiv_ = std::move(xderiv);
    f.cancelled_ = std::move(cancelled);
    f.lambda_ = lambda;
    f.structural_radius_ = structural_radius;
    return f;
  }

 private:
  Mat xderiv_fd(int ell, const Point& p, const Dims& d) const {
    const double h = fd_step(p, d);
    const double zb = ell < d.m ? 1.0 : std::pow(p.z.norm(), d.beta);
    Mat out(d.n());
    for (int i = 0; i < d.n(); ++i) {
      for (int j = 0; j < d.n(); ++j) {
        out(i, j) = zb * fd_derivative(
                             [&](double s) {
                               Point q = p;
                               if (ell < d.m)
                                 q.z[ell] += s;
                               else
                                 q.t[ell - d.m] += s;
                               return eval_(q, d)(i, j);
                             },
                             h);
      }
    }
    return out;
  }

  bool identity_ = true;
  std::string name_ = "identity";
  EvalFn eval_;
  XDerivFn xderiv_;
  CancelledFn cancelled_;
  double lambda_ = 1.0;
  double structural_radius_ = 1.0;
};

inline CoefficientField identity_field() { return CoefficientField::make_identity(); }

// mu = <A X rho, X rho>; comparable to psi: lambda psi <= mu <= lambda^{-1} psi.
inline double eval_mu(const CoefficientField& A, const Point& p, const Dims& d) {
  if (p.is_origin()) throw std::domain_error("eval_mu: undefined at the origin");
  if (A.is_identity()) return angle_psi(p, d);
  if (p.z.norm() == 0.0) return 0.0;  // X rho vanishes on {z = 0}
  const HorizontalVector xr = gauge_xgrad(p, d);
  return A.evaluate(p, d).quad_form(xr);
}

// sigma = <B X rho, X rho> = mu - psi; identically zero for A = I.
inline double eval_sigma(const CoefficientField& A, const Point& p, const Dims& d) {
  if (p.is_origin()) throw std::domain_error("eval_sigma: undefined at the origin");
  if (A.is_identity()) return 0.0;
  if (p.z.norm() == 0.0) return 0.0;
  const HorizontalVector xr = gauge_xgrad(p, d);
  Mat b = A.evaluate(p, d);
  for (int i = 0; i < b.n; ++i) b(i, i) -= 1.0;
  return b.quad_form(xr);
}

namespace detail {

// Generic (uncancelled) sigma/psi and g for fields without a registered
// closed form.  Diverging values flag a family outside the block bounds.
inline CancelledForm cancelled_form_generic(const CoefficientField& A, const Point& p,
                                            const Dims& d) {
  const double psi = angle_psi(p, d);
  const double rho = gauge(p, d);
  if (psi == 0.0)
    throw ConditioningError("F: no cancelled form available on the characteristic set for " +
                            A.name());
  const HorizontalVector xr = gauge_xgrad(p, d);
  Mat b = A.evaluate(p, d);
  for (int i = 0; i < b.n; ++i) b(i, i) -= 1.0;
  CancelledForm c;
  c.sigma_tilde = b.quad_form(xr) / psi;
  c.g = HorizontalVector(d.n());
  for (int j = 0; j < d.n(); ++j) {
    double s = 0.0;
    for (int i = 0; i < d.n(); ++i) s += b(i, j) * xr[i];
    c.g[j] = rho * s / psi;
  }
  // Under the block bounds |g_j| = O(Lambda rho^2); a ratio past 10 rho deep
  // inside the switch region means the psi-cancellation failed.
  for (int j = 0; j < d.n(); ++j) {
    if (!std::isfinite(c.g[j]) || std::abs(c.g[j]) > 10.0 * rho)
      throw ConditioningError("F: coefficient family ill-conditioned near the characteristic set");
  }
  if (!std::isfinite(c.sigma_tilde) || c.sigma_tilde <= -0.5)
    throw ConditioningError("F: sigma/psi out of range near the characteristic set");
  return c;
}

}  // namespace detail

// F f at p given the coordinate gradient of f.  Away from the characteristic
// set this is the direct quotient (rho/mu) <A X rho, X f>; below psi_switch
// the cancelled decomposition.
inline double F_apply_from_grad(const CoefficientField& A, const CoordGrad& g, const Point& p,
                                const Dims& d, double psi_switch = kPsiSwitch) {
  if (p.is_origin()) return 0.0;  // F extends continuously with F f (0) = 0
  const double psi = angle_psi(p, d);
  if (psi >= psi_switch) {
    const double rho = gauge(p, d);
    const double mu = eval_mu(A, p, d);
    const HorizontalVector xr = gauge_xgrad(p, d);
    const HorizontalVector ax = A.is_identity() ? xr : A.evaluate(p, d).apply(xr);
    const HorizontalVector xf = xgrad_from_coord(g, p, d);
    return rho / mu * dot(ax, xf);
  }
  const CancelledForm c =
      A.has_cancelled_form() ? A.cancelled_form(p, d) : detail::cancelled_form_generic(A, p, d);
  double zf = 0.0;
  for (int i = 0; i < d.m; ++i) zf += p.z[i] * g.dz[i];
  for (int j = 0; j < d.k; ++j) zf += (d.beta + 1.0) * p.t[j] * g.dt[j];
  const HorizontalVector xf = xgrad_from_coord(g, p, d);
  return (zf + dot(c.g, xf)) / (1.0 + c.sigma_tilde);
}

inline double F_apply(const CoefficientField& A, const ScalarField& f, const Point& p,
                      const Dims& d, double psi_switch = kPsiSwitch) {
  if (p.is_origin()) return 0.0;
  return F_apply_from_grad(A, coord_grad(f, p, d), p, d, psi_switch);
}

// ---------------------------------------------------------------------------
// Built-in coefficient families.
// ---------------------------------------------------------------------------

namespace detail {

// Block weight of the structural bounds: rho on the z-block,
// |z|^{beta+1}/rho^beta = psi^{1/2+1/(2 beta)} rho elsewhere.
inline double block_weight(int i, int j, int m, const Point& p, const Dims& d) {
  const double rho = gauge(p, d);
  if (i < m && j < m) return rho;
  const double zn = p.z.norm();
  return std::pow(zn, d.beta + 1.0) / std::pow(rho, d.beta);
}

// X_l of the two block weights, closed form.
inline double block_weight_xderiv(int ell, int i, int j, int m, const Point& p, const Dims& d) {
  const double rho = gauge(p, d);
  const HorizontalVector xr = gauge_xgrad(p, d);
  if (i < m && j < m) return xr[ell];
  const double zn = p.z.norm();
  const double w = std::pow(zn, d.beta + 1.0) / std::pow(rho, d.beta);
  if (ell < m) {
    // d/dz_l (|z|^{beta+1} rho^{-beta})
    return (d.beta + 1.0) * std::pow(zn, d.beta - 1.0) * p.z[ell] / std::pow(rho, d.beta) -
           d.beta * w / rho * xr[ell];
  }
  return -d.beta * w / rho * xr[ell];
}

}  // namespace detail

// A = I + B with b_ij = eps * s_ij * w(i,j), where w is exactly the block
// weight of the structural bounds; the family lies inside the hypothesis
// class with constant O(eps * max|s_ij|).
inline CoefficientField make_perturbed(double eps, const Mat& S, const Dims& d,
                                       double structural_radius = 1.0) {
  if (S.n != d.n()) throw std::invalid_argument("make_perturbed: S must be N x N");
  if (!S.symmetric(1e-14)) throw std::invalid_argument("make_perturbed: S must be symmetric");
  // Both weights are bounded by rho <= R1, so ||B||_2 <= eps ||S||_F R1.
  const double margin = std::abs(eps) * S.frobenius_norm() * structural_radius;
  if (margin > 0.5)
    throw std::invalid_argument("make_perturbed: eps too large for the ellipticity margin 1/2");
  const double lam = 1.0 - margin;
  const int m = d.m;
  Mat Sc = S;

  auto eval = [eps, Sc, m](const Point& p, const Dims& dd) {
    Mat a = Mat::identity(dd.n());
    if (p.is_origin()) return a;  // both weights vanish at the origin
    for (int i = 0; i < dd.n(); ++i)
      for (int j = 0; j < dd.n(); ++j)
        a(i, j) += eps * Sc(i, j) * detail::block_weight(i, j, m, p, dd);
    return a;
  };
  auto xderiv = [eps, Sc, m](int ell, const Point& p, const Dims& dd) {
    Mat g(dd.n());
    for (int i = 0; i < dd.n(); ++i)
      for (int j = 0; j < dd.n(); ++j)
        g(i, j) = eps * Sc(i, j) * detail::block_weight_xderiv(ell, i, j, m, p, dd);
    return g;
  };
  // (rho/psi) w(i,j) X_i rho in psi-cancelled closed form:
  //   i <= m, j <= m : rho z_i
  //   i <= m, j >  m : (|z|^{beta+1}/rho^beta) z_i
  //   i >  m         : (beta+1) t_{i-m} |z| / rho^beta
  auto cancelled = [eps, Sc, m](const Point& p, const Dims& dd) {
    CancelledForm c;
    c.g = HorizontalVector(dd.n());
    const double rho = gauge(p, dd);
    const double zn = p.z.norm();
    const double w2 = std::pow(zn, dd.beta + 1.0) / std::pow(rho, dd.beta);
    const double bp1 = dd.beta + 1.0;
    // e = X rho / sqrt(psi), unit length, stable:
    //   e_i = sqrt(psi) z_i / rho,   e_{m+j} = (beta+1) t_j / rho^{beta+1}.
    const double sqrt_psi = std::pow(zn / rho, dd.beta);
    HorizontalVector e(dd.n());
    for (int i = 0; i < m; ++i) e[i] = sqrt_psi * p.z[i] / rho;
    for (int j = 0; j < dd.k; ++j) e[m + j] = bp1 * p.t[j] / std::pow(rho, bp1);
    double sigma_tilde = 0.0;
    for (int i = 0; i < dd.n(); ++i) {
      for (int j = 0; j < dd.n(); ++j) {
        const double w = (i < m && j < m) ? rho : w2;
        sigma_tilde += eps * Sc(i, j) * w * e[i] * e[j];
      }
    }
    c.sigma_tilde = sigma_tilde;
    const double tshared = bp1 * zn / std::pow(rho, dd.beta);
    for (int j = 0; j < dd.n(); ++j) {
      double s = 0.0;
      for (int i = 0; i < dd.n(); ++i) {
        double gij;
        if (i < m)
          gij = (j < m ? rho : w2) * p.z[i];
        else
          gij = tshared * p.t[i - m];
        s += eps * Sc(i, j) * gij;
      }
      c.g[j] = s;
    }
    return c;
  };

  char label[64];
  std::snprintf(label, sizeof(label), "perturbed(eps=%g)", eps);
  return CoefficientField::make_custom(label, eval, xderiv, cancelled, lam, structural_radius);
}

inline Mat ones_matrix(int n) {
  Mat s(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = 1.0;
  return s;
}

// Deliberate counterexample: the t-block entries scale like eps * rho, which
// uses the z-block weight where the cross/t-block bound demands the extra
// psi^{1/2+1/(2 beta)} factor.  The hypothesis ratio diverges as psi -> 0.
inline CoefficientField make_tblock_violator(double eps, const Dims& d,
                                             double structural_radius = 1.0) {
  if (d.k < 1) throw std::invalid_argument("make_tblock_violator: requires k >= 1");
  if (!(std::abs(eps) < 0.5))
    throw std::invalid_argument("make_tblock_violator: |eps| must stay below 1/2");
  auto eval = [eps](const Point& p, const Dims& dd) {
    Mat a = Mat::identity(dd.n());
    if (p.is_origin()) return a;
    const double rho = gauge(p, dd);
    for (int j = 0; j < dd.k; ++j) a(dd.m + j, dd.m + j) += eps * rho;
    return a;
  };
  auto xderiv = [eps](int ell, const Point& p, const Dims& dd) {
    Mat g(dd.n());
    const HorizontalVector xr = gauge_xgrad(p, dd);
    for (int j = 0; j < dd.k; ++j) g(dd.m + j, dd.m + j) = eps * xr[ell];
    return g;
  };
  char label[64];
  std::snprintf(label, sizeof(label), "tblock_violator(eps=%g)", eps);
  return CoefficientField::make_custom(label, eval, xderiv, nullptr, 1.0 - std::abs(eps),
                                       structural_radius);
}

// ---------------------------------------------------------------------------
// Hypothesis checker.
// ---------------------------------------------------------------------------

struct BoundSample {
  double ratio = 0.0;
  Point worst;
};

struct HypothesisReport {
  double lambda_hat = 0.0;              // max of the four bound ratios
  std::array<BoundSample, 4> bounds{};  // z-block, cross/t-block, z-derivs, other derivs
  std::array<double, 3> levels{};       // lambda_hat at n, 4n, 16n samples
  bool stable = false;                  // last two levels agree within 5%
  bool structural_ok = true;            // symmetric + uniformly elliptic on the sample
  double eig_min = 1.0;
  double eig_max = 1.0;
  bool diverging = false;               // cross-block ratio grows across psi-decades
  double decade_growth = 0.0;           // median per-decade growth factor of the ratio
  bool pass = false;
  std::size_t points = 0;

  bool inconclusive() const { return !stable && structural_ok && !diverging; }
};

namespace detail {

// Sample of B_{R1} for pointwise bound checking: uniform points off the
// collar plus a log-stratified tail toward {z = 0} so ratio growth in psi is
// observable well below the uniform-sampling range.
inline std::vector<Point> hypothesis_sample(double r1, std::size_t n, std::uint64_t seed,
                                            const Dims& d) {
  std::vector<Point> pts = sample_ball_off_collar(r1, n / 2 + 1, seed, d);
  Rng rng(seed ^ 0xabcdef1234567890ULL);
  std::vector<Point> base = sample_ball_off_collar(r1, n - pts.size(), seed + 1, d);
  for (auto p : base) {
    // shrink z toward the characteristic set, log-uniform over four decades
    const double s = std::pow(10.0, -4.0 * rng.next_double());
    for (int i = 0; i < d.m; ++i) p.z[i] *= s;
    if (!in_characteristic_collar(p, d, 1e-5) && gauge(p, d) < r1) pts.push_back(p);
  }
  return pts;
}

struct RatioAccum {
  std::array<BoundSample, 4> bounds{};
  std::map<int, double> cross_by_decade;  // floor(log10 psi) -> max cross-block ratio

  void add(int which, double ratio, const Point& p) {
    if (ratio > bounds[static_cast<std::size_t>(which)].ratio) {
      bounds[static_cast<std::size_t>(which)].ratio = ratio;
      bounds[static_cast<std::size_t>(which)].worst = p;
    }
  }
  double lambda_hat() const {
    double m = 0.0;
    for (const auto& b : bounds) m = std::max(m, b.ratio);
    return m;
  }
};

}  // namespace detail

// Certifies the four structural bounds over three refinement levels
// (n, 4n, 16n points) of B_{R1}; lambda_hat is the max sampled ratio and must
// stabilize within 5% between the last two levels to count as conclusive.
inline HypothesisReport check_structural(const CoefficientField& A, double r1, std::size_t n,
                                         std::uint64_t seed, const Dims& d,
                                         double lambda_budget = 1.0) {
  if (n < 1) throw std::invalid_argument("check_structural: n must be >= 1");
  HypothesisReport rep;
  const int m = d.m;
  const double inv2b = 1.0 / (2.0 * d.beta);

  detail::RatioAccum acc;
  std::size_t level_n = n;
  for (int level = 0; level < 3; ++level, level_n *= 4) {
    const auto pts = detail::hypothesis_sample(r1, level_n, seed + static_cast<std::uint64_t>(level), d);
    for (const auto& p : pts) {
      const double rho = gauge(p, d);
      const double psi = angle_psi(p, d);
      const Mat a = A.evaluate(p, d);
      if (!a.symmetric(1e-12 * (1.0 + a.frobenius_norm()))) rep.structural_ok = false;
      const EigRange er = sym_eig_range(a);
      rep.eig_min = std::min(rep.eig_min, er.min);
      rep.eig_max = std::max(rep.eig_max, er.max);
      if (er.min <= 0.0) rep.structural_ok = false;

      const double w_cross = std::pow(psi, 0.5 + inv2b) * rho;
      for (int i = 0; i < d.n(); ++i) {
        for (int j = i; j < d.n(); ++j) {
          const double b = a(i, j) - (i == j ? 1.0 : 0.0);
          if (i < m && j < m) {
            acc.add(0, std::abs(b) / rho, p);
          } else {
            const double ratio = std::abs(b) / w_cross;
            acc.add(1, ratio, p);
            const int dec = static_cast<int>(std::floor(std::log10(std::max(psi, 1e-300))));
            auto& slot = acc.cross_by_decade[dec];
            slot = std::max(slot, ratio);
          }
        }
      }
      const double sqrt_psi = std::sqrt(psi);
      for (int ell = 0; ell < d.n(); ++ell) {
        const Mat g = A.xderiv(ell, p, d);
        for (int i = 0; i < d.n(); ++i) {
          for (int j = i; j < d.n(); ++j) {
            if (ell < m && i < m && j < m)
              acc.add(2, std::abs(g(i, j)), p);
            else
              acc.add(3, std::abs(g(i, j)) / sqrt_psi, p);
          }
        }
      }
    }
    rep.levels[static_cast<std::size_t>(level)] = acc.lambda_hat();
    rep.points += pts.size();
  }

  rep.bounds = acc.bounds;
  rep.lambda_hat = acc.lambda_hat();
  const double l1 = rep.levels[1], l2 = rep.levels[2];
  rep.stable = (l2 == 0.0 && l1 == 0.0) || std::abs(l2 - l1) <= 0.05 * std::max(l2, l1);

  // Divergence scan: growth of the cross-block ratio per psi-decade.
  std::vector<double> growth;
  for (auto it = acc.cross_by_decade.begin(); it != acc.cross_by_decade.end(); ++it) {
    auto next = std::next(it);
    if (next == acc.cross_by_decade.end()) break;
    if (next->first == it->first + 1 && it->second > 0.0 && next->second > 0.0)
      growth.push_back(it->second / next->second);  // deeper decade / shallower decade
  }
  if (growth.size() >= 3) {
    std::sort(growth.begin(), growth.end());
    rep.decade_growth = growth[growth.size() / 2];
    int rising = 0;
    for (double g : growth)
      if (g >= 3.0) ++rising;
    rep.diverging = rising >= static_cast<int>(growth.size()) - 1 && rep.decade_growth >= 3.0;
  }

  rep.pass = rep.structural_ok && rep.stable && !rep.diverging && rep.lambda_hat <= lambda_budget;
  return rep;
}

// ---------------------------------------------------------------------------
// Potentials.
// ---------------------------------------------------------------------------

enum class Provenance { closed_form, estimated };

class Potential {
 public:
  Potential() = default;
  Potential(ScalarField field, double k_bound, Provenance prov, std::string name = "potential")
      : field_(std::move(field)), k_bound_(k_bound), provenance_(prov), name_(std::move(name)) {
    if (!(k_bound_ >= 1.0)) throw std::invalid_argument("Potential: K must be >= 1");
  }

  static Potential zero() {
    return Potential(ScalarField([](const Point&, const Dims&) { return 0.0; },
                                 [](const Point&, const Dims& d) {
                                   CoordGrad g;
                                   g.dz = ZVec(d.m);
                                   g.dt = TVec(d.k);
                                   return g;
                                 }),
                     1.0, Provenance::closed_form, "zero");
  }

  double operator()(const Point& p, const Dims& d) const { return field_(p, d); }
  const ScalarField& field() const { return field_; }
  double k_bound() const { return k_bound_; }
  Provenance provenance() const { return provenance_; }
  const std::string& name() const { return name_; }
  bool is_zero() const { return name_ == "zero"; }

 private:
  ScalarField field_ = ScalarField([](const Point&, const Dims&) { return 0.0; });
  double k_bound_ = 1.0;
  Provenance provenance_ = Provenance::closed_form;
  std::string name_ = "zero";
};

struct PotentialReport {
  double k_hat = 1.0;
  std::array<double, 3> levels{1.0, 1.0, 1.0};
  bool stable = false;
  bool failed = false;  // ratio kept growing across refinement levels
  Point worst_value;
  Point worst_fderiv;
  double max_value_ratio = 0.0;
  double max_fderiv_ratio = 0.0;
  std::size_t points = 0;

  bool inconclusive() const { return !stable && !failed; }
};

// K_hat = max(1, sup |V|/psi, sup |F V|/psi) over three refinement levels of
// samples in B_{R1} off the collar.
inline PotentialReport check_potential(const Potential& V, const CoefficientField& A, double r1,
                                       std::size_t n, std::uint64_t seed, const Dims& d) {
  PotentialReport rep;
  std::size_t level_n = n;
  for (int level = 0; level < 3; ++level, level_n *= 4) {
    const auto pts = sample_ball_off_collar(r1, level_n, seed + static_cast<std::uint64_t>(level), d);
    for (const auto& p : pts) {
      const double psi = angle_psi(p, d);
      const double rv = std::abs(V(p, d)) / psi;
      const double rf = std::abs(F_apply(A, V.field(), p, d)) / psi;
      if (rv > rep.max_value_ratio) {
        rep.max_value_ratio = rv;
        rep.worst_value = p;
      }
      if (rf > rep.max_fderiv_ratio) {
        rep.max_fderiv_ratio = rf;
        rep.worst_fderiv = p;
      }
    }
    rep.levels[static_cast<std::size_t>(level)] =
        std::max(1.0, std::max(rep.max_value_ratio, rep.max_fderiv_ratio));
    rep.points += pts.size();
  }
  rep.k_hat = rep.levels[2];
  rep.stable = std::abs(rep.levels[2] - rep.levels[1]) <= 0.05 * rep.levels[2];
  rep.failed = rep.levels[2] > 2.0 * rep.levels[1] && rep.levels[1] > 2.0 * rep.levels[0];
  return rep;
}

}  // namespace grushin
