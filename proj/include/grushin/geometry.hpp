#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "grushin/core.hpp"

// Closed-form calculus for the degenerate frame
//
//   X_i = d/dz_i (i <= m),   X_{m+j} = |z|^beta d/dt_j (j <= k),
//
// its anisotropic dilations delta_a(z,t) = (a z, a^{beta+1} t), the gauge
//
//   rho(z,t) = (|z|^{2(beta+1)} + (beta+1)^2 |t|^2)^{1/(2(beta+1))},
//
// the generator Z of the dilations, and the angle function
// psi = |X rho|^2 = |z|^{2 beta} / rho^{2 beta}.
//
// Derivatives of rho and psi are exact closed forms so that the identities
// Z rho = rho, Z psi = 0, |X rho|^2 = psi hold to rounding and can serve as
// oracles for everything downstream.

namespace grushin {

inline double gauge(const Point& p, const Dims& d) {
  const double bp1 = d.beta + 1.0;
  const double zs = p.z.norm_sq();
  const double ts = p.t.norm_sq();
  const double core = std::pow(zs, bp1) + bp1 * bp1 * ts;
  return std::pow(core, 1.0 / (2.0 * bp1));
}

// rho^2, computed without the intermediate 2(beta+1) root.
inline double gauge_sq(const Point& p, const Dims& d) {
  const double bp1 = d.beta + 1.0;
  const double zs = p.z.norm_sq();
  const double ts = p.t.norm_sq();
  const double core = std::pow(zs, bp1) + bp1 * bp1 * ts;
  return std::pow(core, 1.0 / bp1);
}

inline Point dilate(const Point& p, double a, const Dims& d) {
  if (!(a > 0.0)) throw std::invalid_argument("dilate: scale factor must be positive");
  Point q = p;
  const double at = std::pow(a, d.beta + 1.0);
  for (int i = 0; i < q.z.n; ++i) q.z[i] *= a;
  for (int j = 0; j < q.t.n; ++j) q.t[j] *= at;
  return q;
}

// psi = |z|^{2 beta} / rho^{2 beta}; zero on the characteristic set {z = 0},
// extended by 0 at the origin (a single point, irrelevant for integrals).
inline double angle_psi(const Point& p, const Dims& d) {
  const double zn = p.z.norm();
  if (zn == 0.0) {
    if (p.is_origin()) throw std::domain_error("angle_psi: undefined at the origin");
    return 0.0;
  }
  const double rho = gauge(p, d);
  return std::pow(zn / rho, 2.0 * d.beta);
}

// psi for integration: origin contributes 0 instead of throwing.
inline double angle_psi_or_zero(const Point& p, const Dims& d) {
  const double zn = p.z.norm();
  if (zn == 0.0) return 0.0;
  const double rho = gauge(p, d);
  return std::pow(zn / rho, 2.0 * d.beta);
}

// Closed-form X rho:
//   X_i rho     = |z|^{2 beta} z_i rho^{-(2 beta + 1)}          (i <= m)
//   X_{m+j} rho = (beta+1) |z|^beta t_j rho^{-(2 beta + 1)}     (j <= k)
inline HorizontalVector gauge_xgrad(const Point& p, const Dims& d) {
  if (p.is_origin()) throw std::domain_error("gauge_xgrad: undefined at the origin");
  const double rho = gauge(p, d);
  const double zn = p.z.norm();
  const double rp = std::pow(rho, -(2.0 * d.beta + 1.0));
  const double z2b = std::pow(zn, 2.0 * d.beta);
  const double zb = std::pow(zn, d.beta);
  HorizontalVector g(d.n());
  for (int i = 0; i < d.m; ++i) g[i] = z2b * p.z[i] * rp;
  for (int j = 0; j < d.k; ++j) g[d.m + j] = (d.beta + 1.0) * zb * p.t[j] * rp;
  return g;
}

// Coordinate gradient of rho (d/dz_i and d/dt_j, without the |z|^beta frame
// factor on the t-slots).
inline CoordGrad gauge_coord_grad(const Point& p, const Dims& d) {
  if (p.is_origin()) throw std::domain_error("gauge_coord_grad: undefined at the origin");
  const double rho = gauge(p, d);
  const double zn = p.z.norm();
  const double rp = std::pow(rho, -(2.0 * d.beta + 1.0));
  const double z2b = std::pow(zn, 2.0 * d.beta);
  CoordGrad g;
  g.dz = ZVec(d.m);
  g.dt = TVec(d.k);
  for (int i = 0; i < d.m; ++i) g.dz[i] = z2b * p.z[i] * rp;
  for (int j = 0; j < d.k; ++j) g.dt[j] = (d.beta + 1.0) * p.t[j] * rp;
  return g;
}

// Closed-form X psi. With psi = |z|^{2 beta} rho^{-2 beta}:
//   X_i psi     = 2 beta psi ( z_i/|z|^2 - X_i rho / rho )
//   X_{m+j} psi = -2 beta psi X_{m+j} rho / rho
// The z-slot expression stays finite because psi carries |z|^{2 beta}.
inline HorizontalVector angle_psi_xgrad(const Point& p, const Dims& d) {
  const double zn = p.z.norm();
  if (zn == 0.0) throw std::domain_error("angle_psi_xgrad: undefined on {z = 0}");
  const double rho = gauge(p, d);
  const double psi = std::pow(zn / rho, 2.0 * d.beta);
  const HorizontalVector xr = gauge_xgrad(p, d);
  HorizontalVector g(d.n());
  for (int i = 0; i < d.m; ++i) g[i] = 2.0 * d.beta * psi * (p.z[i] / (zn * zn) - xr[i] / rho);
  for (int j = 0; j < d.k; ++j) g[d.m + j] = -2.0 * d.beta * psi * xr[d.m + j] / rho;
  return g;
}

// ---------------------------------------------------------------------------
// Scalar fields. A field carries a value callback and, when available, an
// analytic coordinate gradient; all derivative operators fall back to
// 4th-order central differences with step h_fd = 1e-4 * max(1, rho(p)).
// ---------------------------------------------------------------------------

class ScalarField {
 public:
  using ValueFn = std::function<double(const Point&, const Dims&)>;
  using GradFn = std::function<CoordGrad(const Point&, const Dims&)>;

  ScalarField() = default;
  explicit ScalarField(ValueFn value, GradFn grad = nullptr)
      : value_(std::move(value)), grad_(std::move(grad)) {}

  double operator()(const Point& p, const Dims& d) const { return value_(p, d); }
  bool has_grad() const { return static_cast<bool>(grad_); }
  CoordGrad grad(const Point& p, const Dims& d) const { return grad_(p, d); }
  bool valid() const { return static_cast<bool>(value_); }

 private:
  ValueFn value_;
  GradFn grad_;
};

inline double fd_step(const Point& p, const Dims& d) {
  return 1e-4 * std::max(1.0, gauge(p, d));
}

// Coordinate gradient by finite differences.
inline CoordGrad coord_grad_fd(const ScalarField& f, const Point& p, const Dims& d, double h) {
  CoordGrad g;
  g.dz = ZVec(d.m);
  g.dt = TVec(d.k);
  for (int i = 0; i < d.m; ++i) {
    g.dz[i] = fd_derivative(
        [&](double s) {
          Point q = p;
          q.z[i] += s;
          return f(q, d);
        },
        h);
  }
  for (int j = 0; j < d.k; ++j) {
    g.dt[j] = fd_derivative(
        [&](double s) {
          Point q = p;
          q.t[j] += s;
          return f(q, d);
        },
        h);
  }
  return g;
}

inline CoordGrad coord_grad(const ScalarField& f, const Point& p, const Dims& d) {
  if (f.has_grad()) return f.grad(p, d);
  return coord_grad_fd(f, p, d, fd_step(p, d));
}

// X f = (X_1 f, ..., X_N f): z-slots are plain partials, t-slots carry the
// |z|^beta frame factor.
inline HorizontalVector xgrad_from_coord(const CoordGrad& g, const Point& p, const Dims& d) {
  const double zb = std::pow(p.z.norm(), d.beta);
  HorizontalVector x(d.n());
  for (int i = 0; i < d.m; ++i) x[i] = g.dz[i];
  for (int j = 0; j < d.k; ++j) x[d.m + j] = zb * g.dt[j];
  return x;
}

inline HorizontalVector xgrad_apply(const ScalarField& f, const Point& p, const Dims& d) {
  return xgrad_from_coord(coord_grad(f, p, d), p, d);
}

// Z f = sum_i z_i d/dz_i f + (beta+1) sum_j t_j d/dt_j f, the generator of
// the dilations; Z v = kappa v characterizes homogeneity of degree kappa.
inline double euler_apply(const ScalarField& f, const Point& p, const Dims& d) {
  const CoordGrad g = coord_grad(f, p, d);
  double s = 0.0;
  for (int i = 0; i < d.m; ++i) s += p.z[i] * g.dz[i];
  for (int j = 0; j < d.k; ++j) s += (d.beta + 1.0) * p.t[j] * g.dt[j];
  return s;
}

// div Z = m + (beta+1) k = Q, exactly.
inline double euler_divergence(const Dims& d) { return d.q(); }

// Built-in fields with exact gradients; these are the geometric oracles.
inline ScalarField make_gauge_field(const Dims&) {
  return ScalarField([](const Point& p, const Dims& dd) { return gauge(p, dd); },
                     [](const Point& p, const Dims& dd) { return gauge_coord_grad(p, dd); });
}

inline ScalarField make_psi_field(const Dims&) {
  return ScalarField(
      [](const Point& p, const Dims& dd) { return angle_psi_or_zero(p, dd); },
      [](const Point& p, const Dims& dd) {
        // Recover coordinate partials from the X-gradient closed form.
        const HorizontalVector xg = angle_psi_xgrad(p, dd);
        const double zb = std::pow(p.z.norm(), dd.beta);
        CoordGrad g;
        g.dz = ZVec(dd.m);
        g.dt = TVec(dd.k);
        for (int i = 0; i < dd.m; ++i) g.dz[i] = xg[i];
        for (int j = 0; j < dd.k; ++j) g.dt[j] = xg[dd.m + j] / zb;
        return g;
      });
}

// ---------------------------------------------------------------------------
// Sampling on gauge balls B_r = { rho < r }.
// ---------------------------------------------------------------------------

// Tight bounding box of B_r: |z_i| <= r, |t_j| <= r^{beta+1}/(beta+1).
struct BallBox {
  double z_half = 0.0;
  double t_half = 0.0;

  double volume(const Dims& d) const {
    return std::pow(2.0 * z_half, d.m) * std::pow(2.0 * t_half, d.k);
  }
};

inline BallBox ball_box(double r, const Dims& d) {
  BallBox b;
  b.z_half = r;
  b.t_half = std::pow(r, d.beta + 1.0) / (d.beta + 1.0);
  return b;
}

// n points uniform w.r.t. Lebesgue measure in B_r, by rejection from the
// bounding box; deterministic given (seed, n, r).
inline std::vector<Point> sample_ball(double r, std::size_t n, std::uint64_t seed, const Dims& d) {
  if (!(r > 0.0)) throw std::invalid_argument("sample_ball: radius must be positive");
  std::vector<Point> pts;
  pts.reserve(n);
  const BallBox box = ball_box(r, d);
  Rng rng(seed);
  while (pts.size() < n) {
    Point p;
    p.z = ZVec(d.m);
    p.t = TVec(d.k);
    for (int i = 0; i < d.m; ++i) p.z[i] = rng.uniform(-box.z_half, box.z_half);
    for (int j = 0; j < d.k; ++j) p.t[j] = rng.uniform(-box.t_half, box.t_half);
    if (gauge(p, d) < r) pts.push_back(p);
  }
  return pts;
}

// Pointwise estimate sampling excludes a relative collar around {z = 0}
// where quantities like psi/|z| degenerate; integrals are unaffected.
inline bool in_characteristic_collar(const Point& p, const Dims& d, double rel_tol = 1e-3) {
  return p.z.norm() < rel_tol * gauge(p, d);
}

inline std::vector<Point> sample_ball_off_collar(double r, std::size_t n, std::uint64_t seed,
                                                 const Dims& d, double rel_tol = 1e-3) {
  std::vector<Point> pts;
  pts.reserve(n);
  std::uint64_t salt = 0;
  while (pts.size() < n) {
    auto batch = sample_ball(r, n - pts.size(), seed + 0x9e3779b9ULL * (++salt), d);
    for (const auto& p : batch)
      if (!in_characteristic_collar(p, d, rel_tol)) pts.push_back(p);
  }
  return pts;
}

}  // namespace grushin
