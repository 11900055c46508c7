#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

// Core value types shared by every module: dimension metadata for the
// degenerate geometry, small fixed-capacity vectors for points and
// gradients, a small dense symmetric matrix, and a deterministic RNG
// that behaves identically across compilers and standard libraries.

namespace grushin {

inline constexpr int kMaxZ = 8;   // max z-dimension m
inline constexpr int kMaxT = 6;   // max t-dimension k
inline constexpr int kMaxN = kMaxZ + kMaxT;

// Thrown when F (or another degenerate-ratio quantity) cannot be evaluated
// stably near the characteristic set for a coefficient family that does not
// satisfy the structural block bounds.
class ConditioningError : public std::runtime_error {
 public:
  explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

// Dimension metadata: z in R^m, t in R^k, degeneracy exponent beta > 0.
struct Dims {
  int m = 2;
  int k = 1;
  double beta = 1.0;

  Dims() = default;
  Dims(int m_, int k_, double beta_) : m(m_), k(k_), beta(beta_) { validate(); }

  int n() const { return m + k; }
  // Homogeneous dimension Q = m + (beta+1) k; ball volumes scale like r^Q.
  double q() const { return m + (beta + 1.0) * k; }

  void validate() const {
    if (m < 1 || m > kMaxZ) throw std::invalid_argument("Dims: m must be in [1, " + std::to_string(kMaxZ) + "]");
    if (k < 0 || k > kMaxT) throw std::invalid_argument("Dims: k must be in [0, " + std::to_string(kMaxT) + "]");
    if (!(beta > 0.0)) throw std::invalid_argument("Dims: beta must be positive");
  }
};

// Fixed-capacity inline vector; value semantics, no heap traffic in hot loops.
template <int Cap>
struct FixedVec {
  std::array<double, Cap> v{};
  int n = 0;

  FixedVec() = default;
  explicit FixedVec(int size) : n(size) {
    if (size < 0 || size > Cap) throw std::invalid_argument("FixedVec: size out of range");
  }

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  int size() const { return n; }

  double norm_sq() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }
};

using ZVec = FixedVec<kMaxZ>;
using TVec = FixedVec<kMaxT>;

// Coefficient vector along the frame X_1..X_N.
using HorizontalVector = FixedVec<kMaxN>;

inline double dot(const HorizontalVector& a, const HorizontalVector& b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
  return s;
}

// A location (z, t) in R^m x R^k.
struct Point {
  ZVec z;
  TVec t;

  Point() = default;
  Point(const ZVec& z_, const TVec& t_) : z(z_), t(t_) {}

  static Point zero(const Dims& d) {
    Point p;
    p.z = ZVec(d.m);
    p.t = TVec(d.k);
    return p;
  }

  bool is_origin() const {
    for (int i = 0; i < z.n; ++i)
      if (z[i] != 0.0) return false;
    for (int j = 0; j < t.n; ++j)
      if (t[j] != 0.0) return false;
    return true;
  }
};

// Convenience constructor for tests and examples.
inline Point make_point(std::initializer_list<double> zs, std::initializer_list<double> ts) {
  Point p;
  p.z = ZVec(static_cast<int>(zs.size()));
  p.t = TVec(static_cast<int>(ts.size()));
  int i = 0;
  for (double x : zs) p.z[i++] = x;
  int j = 0;
  for (double x : ts) p.t[j++] = x;
  return p;
}

// Coordinate gradient (d/dz_i, d/dt_j) of a scalar field.
struct CoordGrad {
  ZVec dz;
  TVec dt;
};

// Dense n x n matrix with inline storage, row-major.
struct Mat {
  std::array<double, kMaxN * kMaxN> a{};
  int n = 0;

  Mat() = default;
  explicit Mat(int size) : n(size) {
    if (size < 0 || size > kMaxN) throw std::invalid_argument("Mat: size out of range");
    for (int i = 0; i < n * n; ++i) a[static_cast<std::size_t>(i)] = 0.0;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  static Mat identity(int size) {
    Mat m(size);
    for (int i = 0; i < size; ++i) m(i, i) = 1.0;
    return m;
  }

  bool symmetric(double tol = 0.0) const {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

  HorizontalVector apply(const HorizontalVector& x) const {
    HorizontalVector y(n);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  double quad_form(const HorizontalVector& x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[i] * x[j];
    return s;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }
};

// Eigenvalue range of a symmetric matrix by cyclic Jacobi sweeps.
// Sizes here never exceed kMaxN, so convergence is immediate.
struct EigRange {
  double min = 0.0;
  double max = 0.0;
};

inline EigRange sym_eig_range(Mat a) {
  const int n = a.n;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-30) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double sign = theta >= 0.0 ? 1.0 : -1.0;
        const double tt = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0);
        const double s = tt * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  EigRange r;
  r.min = std::numeric_limits<double>::infinity();
  r.max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    r.min = std::min(r.min, a(i, i));
    r.max = std::max(r.max, a(i, i));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Deterministic RNG. splitmix64 expands seeds, xoshiro256++ generates the
// stream; output is identical on every platform and standard library.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  // Derive an independent stream, e.g. per replicate or per subsystem.
  Rng fork(std::uint64_t salt) const {
    std::uint64_t h = s_[0] ^ (salt * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
    return Rng(h);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }
  std::array<std::uint64_t, 4> s_{};
};

// ---------------------------------------------------------------------------
// Fourth-order central differences; used as the generic fallback wherever a
// closed-form derivative is not available, and by the independent residual
// checks.
// ---------------------------------------------------------------------------

// f'(0) with error O(h^4).
template <class F>
double fd_derivative(F&& f, double h) {
  return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
}

// f'(0) with error O(h^6); used where nested differencing must stay accurate
// close to the characteristic set.
template <class F>
double fd_derivative6(F&& f, double h) {
  return (f(3.0 * h) - 9.0 * f(2.0 * h) + 45.0 * f(h) - 45.0 * f(-h) + 9.0 * f(-2.0 * h) -
          f(-3.0 * h)) /
         (60.0 * h);
}

// f''(0) with error O(h^4).
template <class F>
double fd_second_derivative(F&& f, double h) {
  return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
}

}  // namespace grushin
