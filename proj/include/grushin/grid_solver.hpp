#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "grushin/core.hpp"
#include "grushin/fields.hpp"
#include "grushin/geometry.hpp"
#include "grushin/solutions.hpp"

// Divergence-form finite differences for  sum_i X_i(a_ij X_j u) = V u  on an
// axis-aligned box, m = 2, k = 1.  In coordinates the operator is
// div(A~ grad u) with A~ = D A D, D = diag(1, 1, |z|^beta), since |z| does
// not depend on t.  Face-centered coefficients give the symmetric second-order
// stencil on the diagonal part; mixed entries (perturbed coefficient
// families) are discretized with centered face-averaged cross differences.
// Nodes sit at cell centers with an extra quarter-cell shift on the z-axes,
// so no node ever lands on the degenerate set {z = 0}.

namespace grushin {

class SolveNonConvergence : public std::runtime_error {
 public:
  explicit SolveNonConvergence(const std::string& w) : std::runtime_error(w) {}
};

class IndefiniteSystem : public std::runtime_error {
 public:
  explicit IndefiniteSystem(const std::string& w) : std::runtime_error(w) {}
};

struct GridSpec {
  double z_half = 0.6;   // requested symmetric box [-z_half, z_half]^2 in z
  double t_half = 0.16;  // [-t_half, t_half] in t
  int nodes = 17;        // nodes per axis
};

struct GridSolution {
  Dims dims;
  std::array<int, 3> n{};
  std::array<double, 3> lo{};
  std::array<double, 3> h{};
  std::vector<double> values;
  std::string boundary_provenance;

  double coord(int axis, int i) const { return lo[static_cast<std::size_t>(axis)] + (i + 0.5) * h[static_cast<std::size_t>(axis)]; }
  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n[1]) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(n[2]) +
           static_cast<std::size_t>(l);
  }
  Point node(int i, int j, int l) const {
    Point p;
    p.z = ZVec(2);
    p.t = TVec(1);
    p.z[0] = coord(0, i);
    p.z[1] = coord(1, j);
    p.t[0] = coord(2, l);
    return p;
  }
  bool boundary(int i, int j, int l) const {
    return i == 0 || j == 0 || l == 0 || i == n[0] - 1 || j == n[1] - 1 || l == n[2] - 1;
  }
};

namespace detail {

struct Csr {
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<double> val;
  std::vector<double> rhs;
  std::size_t rows = 0;

  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += val[p] * x[col[p]];
      y[r] = s;
    }
  }
};

// Jacobi-preconditioned BiCGStab; relative residual target on the rhs norm.
inline void bicgstab(const Csr& a, std::vector<double>& x, double tol, int max_iter) {
  const std::size_t n = a.rows;
  std::vector<double> diag(n, 1.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
      if (a.col[p] == r && a.val[p] != 0.0) diag[r] = a.val[p];

  auto dot2 = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  };

  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  a.matvec(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = a.rhs[i] - r[i];
  r0 = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const double bnorm = std::sqrt(dot2(a.rhs, a.rhs));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  for (int it = 0; it < max_iter; ++it) {
    const double rho_new = dot2(r0, r);
    if (std::abs(rho_new) < 1e-300) throw SolveNonConvergence("bicgstab: breakdown (rho)");
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) phat[i] = p[i] / diag[i];
    a.matvec(phat, v);
    alpha = rho / dot2(r0, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (std::sqrt(dot2(s, s)) <= tol * bnorm) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
      return;
    }
    for (std::size_t i = 0; i < n; ++i) shat[i] = s[i] / diag[i];
    a.matvec(shat, t);
    const double tt = dot2(t, t);
    if (tt < 1e-300) throw SolveNonConvergence("bicgstab: breakdown (t)");
    omega = dot2(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    if (std::sqrt(dot2(r, r)) <= tol * bnorm) return;
    if (std::abs(omega) < 1e-300) throw SolveNonConvergence("bicgstab: breakdown (omega)");
  }
  throw SolveNonConvergence("bicgstab: no convergence within iteration budget");
}

// A~_{ab} = D A D at an arbitrary (face) point; axes 0,1 are z, axis 2 is t.
inline double coeff_tilde(const CoefficientField& A, const Point& p, const Dims& d, int a, int b) {
  const double zb = std::pow(p.z.norm(), d.beta);
  const double da = a < 2 ? 1.0 : zb;
  const double db = b < 2 ? 1.0 : zb;
  if (A.is_identity()) return a == b ? da * db : 0.0;
  return da * A.evaluate(p, d)(a, b) * db;
}

inline Point offset(const GridSolution& g, int i, int j, int l, int axis, double frac) {
  Point p = g.node(i, j, l);
  const double dx = frac * g.h[static_cast<std::size_t>(axis)];
  if (axis == 0)
    p.z[0] += dx;
  else if (axis == 1)
    p.z[1] += dx;
  else
    p.t[0] += dx;
  return p;
}

}  // namespace detail

// Dirichlet solve of the divergence-form equation on the staggered grid; the
// linear system is solved to relative residual 1e-10.
inline GridSolution solve_fd(const CoefficientField& A, const Potential& V, const GridSpec& spec,
                             const SolutionField& boundary, const Dims& d) {
  if (d.m != 2 || d.k != 1)
    throw std::invalid_argument("solve_fd: grid solver supports m = 2, k = 1");
  if (spec.nodes < 5) throw std::invalid_argument("solve_fd: need at least 5 nodes per axis");

  GridSolution g;
  g.dims = d;
  g.n = {spec.nodes, spec.nodes, spec.nodes};
  const double hz = 2.0 * spec.z_half / spec.nodes;
  const double ht = 2.0 * spec.t_half / spec.nodes;
  // quarter-cell shift keeps every node off {z_i = 0} for any node count
  g.lo = {-spec.z_half - 0.25 * hz, -spec.z_half - 0.25 * hz, -spec.t_half};
  g.h = {hz, hz, ht};
  g.values.assign(static_cast<std::size_t>(spec.nodes) * static_cast<std::size_t>(spec.nodes) *
                      static_cast<std::size_t>(spec.nodes),
                  0.0);
  g.boundary_provenance = boundary.name();

  // boundary data
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l)
        if (g.boundary(i, j, l)) g.values[g.index(i, j, l)] = boundary(g.node(i, j, l), d);

  // interior numbering
  std::vector<std::ptrdiff_t> unknown(g.values.size(), -1);
  std::size_t n_unknown = 0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l)
        if (!g.boundary(i, j, l)) unknown[g.index(i, j, l)] = static_cast<std::ptrdiff_t>(n_unknown++);

  const bool mixed = !A.is_identity();
  detail::Csr sys;
  sys.rows = n_unknown;
  sys.row_ptr.reserve(n_unknown + 1);
  sys.row_ptr.push_back(0);
  sys.rhs.assign(n_unknown, 0.0);

  std::vector<double> row_val;
  std::vector<std::size_t> row_col;
  const int off_i[3] = {1, 0, 0};
  const int off_j[3] = {0, 1, 0};
  const int off_l[3] = {0, 0, 1};

  for (int i = 0; i < g.n[0]; ++i) {
    for (int j = 0; j < g.n[1]; ++j) {
      for (int l = 0; l < g.n[2]; ++l) {
        if (g.boundary(i, j, l)) continue;
        const std::size_t row = static_cast<std::size_t>(unknown[g.index(i, j, l)]);
        // accumulate stencil weights into a small map keyed by node index
        std::vector<std::pair<std::size_t, double>> entries;
        auto add = [&](int ii, int jj, int ll, double w) {
          if (w == 0.0) return;
          entries.emplace_back(g.index(ii, jj, ll), w);
        };

        const Point xc = g.node(i, j, l);
        double diag_flux = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double ha = g.h[static_cast<std::size_t>(a)];
          const double cp = detail::coeff_tilde(A, detail::offset(g, i, j, l, a, +0.5), d, a, a);
          const double cm = detail::coeff_tilde(A, detail::offset(g, i, j, l, a, -0.5), d, a, a);
          add(i + off_i[a], j + off_j[a], l + off_l[a], cp / (ha * ha));
          add(i - off_i[a], j - off_j[a], l - off_l[a], cm / (ha * ha));
          diag_flux += (cp + cm) / (ha * ha);
        }
        add(i, j, l, -diag_flux - V(xc, d));

        if (mixed) {
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
              if (a == b) continue;
              const double ha = g.h[static_cast<std::size_t>(a)];
              const double hb = g.h[static_cast<std::size_t>(b)];
              const double cp = detail::coeff_tilde(A, detail::offset(g, i, j, l, a, +0.5), d, a, b);
              const double cm = detail::coeff_tilde(A, detail::offset(g, i, j, l, a, -0.5), d, a, b);
              // d_a(c d_b u) ~ [cp db_u(+a/2) - cm db_u(-a/2)] / ha with the
              // face derivative averaged over the two adjacent nodes
              const double w = 1.0 / (4.0 * ha * hb);
              auto cross = [&](int sa, double c) {
                // db_u at face (i,j,l) + sa*a/2: average of centered diffs at
                // the two nodes sharing the face
                const int ia = i + (sa > 0 ? off_i[a] : -off_i[a]);
                const int ja = j + (sa > 0 ? off_j[a] : -off_j[a]);
                const int la = l + (sa > 0 ? off_l[a] : -off_l[a]);
                const double sgn = sa > 0 ? 1.0 : -1.0;
                add(i + off_i[b], j + off_j[b], l + off_l[b], sgn * c * w);
                add(i - off_i[b], j - off_j[b], l - off_l[b], -sgn * c * w);
                add(ia + off_i[b], ja + off_j[b], la + off_l[b], sgn * c * w);
                add(ia - off_i[b], ja - off_j[b], la - off_l[b], -sgn * c * w);
              };
              cross(+1, cp);
              cross(-1, cm);
            }
          }
        }

        // merge duplicates, split boundary contributions into the rhs
        std::sort(entries.begin(), entries.end());
        row_val.clear();
        row_col.clear();
        double rhs = 0.0;
        double diag_val = 0.0;
        for (std::size_t e = 0; e < entries.size();) {
          std::size_t idx = entries[e].first;
          double w = 0.0;
          while (e < entries.size() && entries[e].first == idx) w += entries[e++].second;
          if (unknown[idx] >= 0) {
            row_col.push_back(static_cast<std::size_t>(unknown[idx]));
            row_val.push_back(w);
            if (static_cast<std::size_t>(unknown[idx]) == row) diag_val = w;
          } else {
            rhs -= w * g.values[idx];
          }
        }
        if (diag_val >= 0.0)
          throw IndefiniteSystem("solve_fd: nonnegative diagonal; potential too strong for the box");
        sys.rhs[row] = rhs;
        for (std::size_t e = 0; e < row_col.size(); ++e) {
          sys.col.push_back(row_col[e]);
          sys.val.push_back(row_val[e]);
        }
        sys.row_ptr.push_back(sys.col.size());
      }
    }
  }

  std::vector<double> x(n_unknown, 0.0);
  detail::bicgstab(sys, x, 1e-10, 20000);

  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l)
        if (!g.boundary(i, j, l)) g.values[g.index(i, j, l)] = x[static_cast<std::size_t>(unknown[g.index(i, j, l)])];
  return g;
}

// Multilinear interpolant of the nodal values as a SolutionField; the
// gradient is the exact derivative of the interpolant.
inline SolutionField grid_to_field(const GridSolution& g) {
  struct Interp {
    GridSolution g;

    void locate(double x, int axis, int& i0, double& w) const {
      const double s = (x - g.lo[static_cast<std::size_t>(axis)]) / g.h[static_cast<std::size_t>(axis)] - 0.5;
      i0 = static_cast<int>(std::floor(s));
      w = s - i0;
      if (i0 < 0 || i0 + 1 >= g.n[static_cast<std::size_t>(axis)])
        throw std::domain_error("grid field: evaluation outside the node hull");
    }
    double value(const Point& p) const {
      int i0, j0, l0;
      double wi, wj, wl;
      locate(p.z[0], 0, i0, wi);
      locate(p.z[1], 1, j0, wj);
      locate(p.t[0], 2, l0, wl);
      double v = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            v += (a ? wi : 1.0 - wi) * (b ? wj : 1.0 - wj) * (c ? wl : 1.0 - wl) *
                 g.values[g.index(i0 + a, j0 + b, l0 + c)];
      return v;
    }
    CoordGrad grad(const Point& p, const Dims& d) const {
      int i0, j0, l0;
      double wi, wj, wl;
      locate(p.z[0], 0, i0, wi);
      locate(p.z[1], 1, j0, wj);
      locate(p.t[0], 2, l0, wl);
      CoordGrad out;
      out.dz = ZVec(d.m);
      out.dt = TVec(d.k);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) {
            const double v = g.values[g.index(i0 + a, j0 + b, l0 + c)];
            const double fa = a ? wi : 1.0 - wi, da = a ? 1.0 : -1.0;
            const double fb = b ? wj : 1.0 - wj, db = b ? 1.0 : -1.0;
            const double fc = c ? wl : 1.0 - wl, dc = c ? 1.0 : -1.0;
            out.dz[0] += da / g.h[0] * fb * fc * v;
            out.dz[1] += fa * db / g.h[1] * fc * v;
            out.dt[0] += fa * fb * dc / g.h[2] * v;
          }
      return out;
    }
  };

  auto interp = std::make_shared<Interp>(Interp{g});
  double bound = 0.0;
  for (double v : g.values) bound = std::max(bound, std::abs(v));
  ScalarField f([interp](const Point& p, const Dims&) { return interp->value(p); },
                [interp](const Point& p, const Dims& dd) { return interp->grad(p, dd); });
  return SolutionField("grid(" + g.boundary_provenance + ")", std::move(f), std::nullopt,
                       std::nullopt, bound);
}

// CSV round-trip with a self-describing header (dims, box, spacing).
inline void save_grid_csv(const GridSolution& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_grid_csv: cannot open " + path);
  char buf[256];
  out << "m,k,beta,n0,n1,n2,lo0,lo1,lo2,h0,h1,h2,provenance\n";
  std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,",
                g.dims.m, g.dims.k, g.dims.beta, g.n[0], g.n[1], g.n[2], g.lo[0], g.lo[1], g.lo[2],
                g.h[0], g.h[1], g.h[2]);
  out << buf << g.boundary_provenance << "\n";
  for (double v : g.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
}

inline GridSolution load_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_grid_csv: cannot open " + path);
  std::string header, meta;
  std::getline(in, header);
  std::getline(in, meta);
  GridSolution g;
  std::replace(meta.begin(), meta.end(), ',', ' ');
  std::istringstream ms(meta);
  int m, k;
  double beta;
  ms >> m >> k >> beta >> g.n[0] >> g.n[1] >> g.n[2] >> g.lo[0] >> g.lo[1] >> g.lo[2] >> g.h[0] >>
      g.h[1] >> g.h[2] >> g.boundary_provenance;
  if (!ms) throw std::runtime_error("load_grid_csv: malformed header in " + path);
  g.dims = Dims(m, k, beta);
  const std::size_t total = static_cast<std::size_t>(g.n[0]) * static_cast<std::size_t>(g.n[1]) *
                            static_cast<std::size_t>(g.n[2]);
  g.values.reserve(total);
  double v;
  while (in >> v) g.values.push_back(v);
  if (g.values.size() != total) throw std::runtime_error("load_grid_csv: value count mismatch");
  return g;
}

}  // namespace grushin
