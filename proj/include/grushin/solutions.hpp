#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "grushin/core.hpp"
#include "grushin/fields.hpp"
#include "grushin/geometry.hpp"

// Exact solutions of  sum_i X_i(a_ij X_j u) = V u  with A = I and closed-form
// potentials, used as ground truth throughout.  All members are built from
// the radial identity
//
//   L f(rho) = psi ( f'' + (Q-1) f'/rho ),    L = Delta_z + |z|^{2 beta} Delta_t,
//
// and the product rule  L(f g) = f L g + g L f + 2 <X f, X g>.  With the
// Gaussian G = e^{-rho^2/2} this gives L G = (rho^2 - Q) psi G, and for an
// L-harmonic factor g homogeneous of degree kappa (so <X g, X G> =
// -kappa psi g G):
//
//   L(g G) = (rho^2 - Q - 2 kappa) psi g G.
//
// Every attached potential is re-verified against nested finite differences
// in the test suite before anything downstream trusts it.

namespace grushin {

enum class SolutionKind {
  coordinate_z,      // u = z_1,                  kappa = 1,        V = 0
  coordinate_t,      // u = t_1,                  kappa = beta + 1, V = 0
  planar_harmonic,   // u = Re((z_1 + i z_2)^p),  kappa = p,        V = 0
  gaussian_radial,   // u = G,                    kappa = 0,        V = (rho^2 - Q) psi
  gaussian_modulated // u = g G,                  kappa = kappa_g,  V = (rho^2 - Q - 2 kappa_g) psi
};

struct SolutionParams {
  int p = 3;                                           // planar harmonic degree
  SolutionKind modulation = SolutionKind::coordinate_z;  // factor g for gaussian_modulated
};

class SolutionField {
 public:
  SolutionField() = default;
  SolutionField(std::string name, ScalarField field, std::optional<double> kappa,
                std::optional<Potential> exact_potential, double bound_c0)
      : name_(std::move(name)),
        field_(std::move(field)),
        kappa_(kappa),
        exact_potential_(std::move(exact_potential)),
        bound_c0_(bound_c0) {}

  double operator()(const Point& p, const Dims& d) const { return field_(p, d); }
  HorizontalVector xgrad(const Point& p, const Dims& d) const { return xgrad_apply(field_, p, d); }

  const ScalarField& field() const { return field_; }
  const std::string& name() const { return name_; }
  std::optional<double> kappa() const { return kappa_; }
  const std::optional<Potential>& exact_potential() const { return exact_potential_; }
  double bound_c0() const { return bound_c0_; }

 private:
  std::string name_;
  ScalarField field_;
  std::optional<double> kappa_;
  std::optional<Potential> exact_potential_;
  double bound_c0_ = 0.0;
};

namespace detail {

// w^p by iterated multiplication; exact zero at w = 0 where the exp/log
// route of std::pow would emit NaN.
inline std::complex<double> cpow_int(std::complex<double> w, int p) {
  std::complex<double> r(1.0, 0.0);
  for (int i = 0; i < p; ++i) r *= w;
  return r;
}

// d(rho^2): dz_i = 2 psi z_i, dt_j = 2 (beta+1) t_j rho^{-2 beta};
// both continuous across {z = 0} away from the origin for beta <= 1, and
// bounded after the |z|^beta frame factor for every beta.
inline CoordGrad gauge_sq_grad(const Point& p, const Dims& d) {
  CoordGrad g;
  g.dz = ZVec(d.m);
  g.dt = TVec(d.k);
  if (p.is_origin()) return g;
  const double rho = gauge(p, d);
  const double psi = angle_psi_or_zero(p, d);
  const double rb = std::pow(rho, -2.0 * d.beta);
  for (int i = 0; i < d.m; ++i) g.dz[i] = 2.0 * psi * p.z[i];
  for (int j = 0; j < d.k; ++j) g.dt[j] = 2.0 * (d.beta + 1.0) * p.t[j] * rb;
  return g;
}

inline ScalarField gaussian_factor() {
  return ScalarField(
      [](const Point& p, const Dims& d) { return std::exp(-0.5 * gauge_sq(p, d)); },
      [](const Point& p, const Dims& d) {
        const double g = std::exp(-0.5 * gauge_sq(p, d));
        CoordGrad cg = gauge_sq_grad(p, d);
        for (int i = 0; i < d.m; ++i) cg.dz[i] *= -0.5 * g;
        for (int j = 0; j < d.k; ++j) cg.dt[j] *= -0.5 * g;
        return cg;
      });
}

inline ScalarField product(const ScalarField& f, const ScalarField& g) {
  const bool grads = f.has_grad() && g.has_grad();
  return ScalarField(
      [f, g](const Point& p, const Dims& d) { return f(p, d) * g(p, d); },
      grads ? ScalarField::GradFn([f, g](const Point& p, const Dims& d) {
        const double fv = f(p, d), gv = g(p, d);
        CoordGrad fg = f.grad(p, d), gg = g.grad(p, d);
        CoordGrad out;
        out.dz = ZVec(d.m);
        out.dt = TVec(d.k);
        for (int i = 0; i < d.m; ++i) out.dz[i] = fg.dz[i] * gv + fv * gg.dz[i];
        for (int j = 0; j < d.k; ++j) out.dt[j] = fg.dt[j] * gv + fv * gg.dt[j];
        return out;
      })
              : nullptr);
}

// V = (rho^2 - c) psi with its exact coordinate gradient.  On B_1 the
// certified constant is K = max(1, 2, sup_{[0,1]} |s^2 - c|): the value
// ratio |V|/psi = |rho^2 - c| peaks at rho = 0 or rho = 1, and the
// F-derivative ratio |Z V|/psi = 2 rho^2 is at most 2.
inline Potential shifted_radial_potential(double c, const std::string& name) {
  ScalarField f(
      [c](const Point& p, const Dims& d) {
        if (p.is_origin()) return 0.0;
        return (gauge_sq(p, d) - c) * angle_psi_or_zero(p, d);
      },
      [c](const Point& p, const Dims& d) {
        CoordGrad out;
        out.dz = ZVec(d.m);
        out.dt = TVec(d.k);
        if (p.z.norm() == 0.0) return out;  // psi and its z-limit gradient vanish
        const double psi = angle_psi(p, d);
        const double r2 = gauge_sq(p, d);
        const CoordGrad dr2 = gauge_sq_grad(p, d);
        const HorizontalVector xpsi = angle_psi_xgrad(p, d);
        const double zb = std::pow(p.z.norm(), d.beta);
        for (int i = 0; i < d.m; ++i) out.dz[i] = psi * dr2.dz[i] + (r2 - c) * xpsi[i];
        for (int j = 0; j < d.k; ++j) out.dt[j] = psi * dr2.dt[j] + (r2 - c) * xpsi[d.m + j] / zb;
        return out;
      });
  const double k_bound = std::max({1.0, 2.0, std::abs(c), std::abs(1.0 - c)});
  return Potential(std::move(f), k_bound, Provenance::closed_form, name);
}

inline ScalarField homogeneous_factor(SolutionKind kind, int p, const Dims& d) {
  switch (kind) {
    case SolutionKind::coordinate_z:
      return ScalarField([](const Point& q, const Dims&) { return q.z[0]; },
                         [](const Point&, const Dims& dd) {
                           CoordGrad g;
                           g.dz = ZVec(dd.m);
                           g.dt = TVec(dd.k);
                           g.dz[0] = 1.0;
                           return g;
                         });
    case SolutionKind::coordinate_t:
      if (d.k < 1) throw std::invalid_argument("manufactured: coordinate_t requires k >= 1");
      return ScalarField([](const Point& q, const Dims&) { return q.t[0]; },
                         [](const Point&, const Dims& dd) {
                           CoordGrad g;
                           g.dz = ZVec(dd.m);
                           g.dt = TVec(dd.k);
                           g.dt[0] = 1.0;
                           return g;
                         });
    case SolutionKind::planar_harmonic: {
      if (d.m < 2) throw std::invalid_argument("manufactured: planar_harmonic requires m >= 2");
      if (p < 1) throw std::invalid_argument("manufactured: planar_harmonic requires p >= 1");
      return ScalarField(
          [p](const Point& q, const Dims&) {
            return cpow_int(std::complex<double>(q.z[0], q.z[1]), p).real();
          },
          [p](const Point& q, const Dims& dd) {
            const auto wp = cpow_int(std::complex<double>(q.z[0], q.z[1]), p - 1);
            CoordGrad g;
            g.dz = ZVec(dd.m);
            g.dt = TVec(dd.k);
            g.dz[0] = p * wp.real();
            g.dz[1] = -p * wp.imag();
            return g;
          });
    }
    default:
      throw std::invalid_argument("manufactured: not a homogeneous factor kind");
  }
}

inline double homogeneous_kappa(SolutionKind kind, int p, const Dims& d) {
  switch (kind) {
    case SolutionKind::coordinate_z: return 1.0;
    case SolutionKind::coordinate_t: return d.beta + 1.0;
    case SolutionKind::planar_harmonic: return static_cast<double>(p);
    default: throw std::invalid_argument("manufactured: not a homogeneous factor kind");
  }
}

inline std::string kind_name(SolutionKind kind, int p) {
  switch (kind) {
    case SolutionKind::coordinate_z: return "z1";
    case SolutionKind::coordinate_t: return "t1";
    case SolutionKind::planar_harmonic: return "planar_harmonic_p" + std::to_string(p);
    case SolutionKind::gaussian_radial: return "gaussian_radial";
    case SolutionKind::gaussian_modulated: return "gaussian_modulated";
  }
  return "unknown";
}

}  // namespace detail

// Build a manufactured solution; homogeneous kinds have V = 0, Gaussian kinds
// carry the closed-form shifted radial potential.  Sup-norm bound 1 on B_1.
inline SolutionField manufactured(SolutionKind kind, const SolutionParams& params, const Dims& d) {
  const double q = d.q();
  switch (kind) {
    case SolutionKind::coordinate_z:
    case SolutionKind::coordinate_t:
    case SolutionKind::planar_harmonic: {
      auto f = detail::homogeneous_factor(kind, params.p, d);
      const double kappa = detail::homogeneous_kappa(kind, params.p, d);
      return SolutionField(detail::kind_name(kind, params.p), std::move(f), kappa,
                           Potential::zero(), 1.0);
    }
    case SolutionKind::gaussian_radial: {
      auto pot = detail::shifted_radial_potential(q, "gauge_shifted(c=Q)");
      return SolutionField("gaussian_radial", detail::gaussian_factor(), 0.0, std::move(pot), 1.0);
    }
    case SolutionKind::gaussian_modulated: {
      if (params.modulation == SolutionKind::gaussian_radial ||
          params.modulation == SolutionKind::gaussian_modulated)
        throw std::invalid_argument("manufactured: modulation must be a homogeneous kind");
      auto g = detail::homogeneous_factor(params.modulation, params.p, d);
      const double kappa = detail::homogeneous_kappa(params.modulation, params.p, d);
      auto pot = detail::shifted_radial_potential(q + 2.0 * kappa, "gauge_shifted(c=Q+2kappa)");
      auto name = detail::kind_name(params.modulation, params.p) + "_gaussian";
      return SolutionField(std::move(name), detail::product(g, detail::gaussian_factor()), kappa,
                           std::move(pot), 1.0);
    }
  }
  throw std::invalid_argument("manufactured: unknown kind");
}

// The full built-in family admissible for the given dimensions.
inline std::vector<SolutionField> all_manufactured(const Dims& d, int p = 3) {
  std::vector<SolutionField> out;
  SolutionParams sp;
  sp.p = p;
  out.push_back(manufactured(SolutionKind::coordinate_z, sp, d));
  if (d.k >= 1) out.push_back(manufactured(SolutionKind::coordinate_t, sp, d));
  if (d.m >= 2) out.push_back(manufactured(SolutionKind::planar_harmonic, sp, d));
  out.push_back(manufactured(SolutionKind::gaussian_radial, sp, d));
  sp.modulation = SolutionKind::coordinate_z;
  out.push_back(manufactured(SolutionKind::gaussian_modulated, sp, d));
  if (d.k >= 1) {
    sp.modulation = SolutionKind::coordinate_t;
    out.push_back(manufactured(SolutionKind::gaussian_modulated, sp, d));
  }
  if (d.m >= 2) {
    sp.modulation = SolutionKind::planar_harmonic;
    out.push_back(manufactured(SolutionKind::gaussian_modulated, sp, d));
  }
  return out;
}

namespace detail {

// X_i u by 4th-order central differences with intrinsic steps: the t-slots
// difference along exp(s X_{m+j}), i.e. with t-increment s |z|^beta, so the
// differenced function has uniformly bounded derivatives down to the
// characteristic set (|z| is constant along t, making the flow exact).
inline HorizontalVector xgrad_fd_intrinsic(const ScalarField& u, const Point& q, const Dims& d,
                                           double h) {
  HorizontalVector out(d.n());
  for (int i = 0; i < d.m; ++i) {
    out[i] = fd_derivative6(
        [&](double s) {
          Point w = q;
          w.z[i] += s;
          return u(w, d);
        },
        h);
  }
  const double zb = std::pow(q.z.norm(), d.beta);
  for (int j = 0; j < d.k; ++j) {
    out[d.m + j] = fd_derivative6(
        [&](double s) {
          Point w = q;
          w.t[j] += s * zb;
          return u(w, d);
        },
        h);
  }
  return out;
}

}  // namespace detail

// PDE residual  sum_i X_i(a_ij X_j u)(p) - V(p) u(p)  by nested 4th-order
// central differences on the raw values of u only; independent of any
// analytic gradient the field may carry.
inline double residual(const ScalarField& u, const Potential& V, const CoefficientField& A,
                       const Point& p, const Dims& d, double h = 1e-3, double collar_factor = 10.0) {
  if (p.z.norm() < collar_factor * h)
    throw std::domain_error("residual: point too close to the characteristic set for step h");

  auto flux_component = [&](int i, const Point& q) {
    const HorizontalVector xu = detail::xgrad_fd_intrinsic(u, q, d, h);
    if (A.is_identity()) return xu[i];
    const Mat a = A.evaluate(q, d);
    double s = 0.0;
    for (int j = 0; j < d.n(); ++j) s += a(i, j) * xu[j];
    return s;
  };

  double div = 0.0;
  for (int i = 0; i < d.n(); ++i) {
    if (i < d.m) {
      div += fd_derivative6(
          [&](double s) {
            Point q = p;
            q.z[i] += s;
            return flux_component(i, q);
          },
          h);
    } else {
      const double zb = std::pow(p.z.norm(), d.beta);
      div += fd_derivative6(
          [&](double s) {
            Point q = p;
            q.t[i - d.m] += s * zb;
            return flux_component(i, q);
          },
          h);
    }
  }
  return div - V(p, d) * u(p, d);
}

}  // namespace grushin
