#pragma once

#include <cstdlib>
#include <functional>
#include <future>
#include <thread>
#include <vector>

#include "grushin/core.hpp"
#include "grushin/fields.hpp"
#include "grushin/geometry.hpp"
#include "grushin/solutions.hpp"

// Weighted integration over gauge balls:
//
//   integral_{B_r} f (r^2 - rho^2)^alpha (factor)
//
// evaluated through the dilation substitution x = delta_r(y),
//
//   = r^{Q + 2 alpha} integral_{B_1} f(delta_r y) (1 - rho(y)^2)^alpha (factor)(delta_r y),
//
// so a single low-discrepancy point set on B_1 serves every radius and the
// resulting radial profiles are smooth functions of r.  The point set is a
// Sobol sequence on the bounding box with rejection; each of the replicates
// gets an independent Cranley-Patterson shift, the replicate spread gives the
// error estimate, and reduction order is fixed so results are bit-identical
// for any worker count.

namespace grushin {

inline int worker_count() {
  if (const char* env = std::getenv("BGLAB_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 8u));
}

// Gray-code Sobol sequence, 32-bit, dimensions up to kMaxN.
class SobolSequence {
 public:
  explicit SobolSequence(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxN) throw std::invalid_argument("SobolSequence: bad dimension");
    // Primitive polynomial degrees s, coefficients a, and initial direction
    // numbers m for dimensions 2..14 (dimension 1 is van der Corput).
    static constexpr int kS[13] = {1, 2, 3, 3, 4, 4, 5, 5, 5, 5, 5, 5, 6};
    static constexpr int kA[13] = {0, 1, 1, 2, 1, 4, 2, 4, 7, 11, 13, 14, 1};
    static constexpr int kM[13][6] = {{1, 0, 0, 0, 0, 0},  {1, 3, 0, 0, 0, 0},
                                      {1, 3, 1, 0, 0, 0},  {1, 1, 1, 0, 0, 0},
                                      {1, 1, 3, 3, 0, 0},  {1, 3, 5, 13, 0, 0},
                                      {1, 1, 5, 5, 17, 0}, {1, 1, 5, 5, 5, 0},
                                      {1, 1, 7, 11, 19, 0},{1, 1, 5, 1, 1, 0},
                                      {1, 1, 1, 3, 11, 0}, {1, 3, 5, 5, 31, 0},
                                      {1, 3, 3, 9, 7, 49}};
    for (int j = 0; j < kBits; ++j) v_[0][j] = 1u << (31 - j);
    for (int d = 1; d < dim_; ++d) {
      const int s = kS[d - 1];
      const int a = kA[d - 1];
      for (int j = 0; j < s; ++j)
        v_[d][j] = static_cast<std::uint32_t>(kM[d - 1][j]) << (31 - j);
      for (int j = s; j < kBits; ++j) {
        std::uint32_t val = v_[d][j - s] ^ (v_[d][j - s] >> s);
        for (int i = 1; i < s; ++i)
          if ((a >> (s - 1 - i)) & 1) val ^= v_[d][j - i];
        v_[d][j] = val;
      }
    }
    reset();
  }

  void reset() {
    counter_ = 0;
    for (int d = 0; d < dim_; ++d) x_[d] = 0;
  }

  // Next point in [0,1)^dim; the first 2^k points of a fresh sequence form a
  // digital net (the zero point is included, any unshifted coincidence with
  // the box corner is handled by the Cranley-Patterson rotation).
  void next(double* out) {
    for (int d = 0; d < dim_; ++d) out[d] = static_cast<double>(x_[d]) * 0x1.0p-32;
    int c = 0;
    std::uint64_t n = counter_++;
    while (n & 1) {
      n >>= 1;
      ++c;
    }
    for (int d = 0; d < dim_; ++d) x_[d] ^= v_[d][c];
  }

 private:
  static constexpr int kBits = 32;
  int dim_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, kMaxN> x_{};
  std::array<std::array<std::uint32_t, kBits>, kMaxN> v_{};
};

// Shared randomized-QMC point set on B_1 = { rho < 1 }.
class BallSampler {
 public:
  BallSampler(const Dims& d, std::size_t budget, int replicates, std::uint64_t seed)
      : d_(d), budget_(budget), replicates_(replicates), seed_(seed), box_(ball_box(1.0, d)) {
    if (budget < 16) throw std::invalid_argument("BallSampler: budget too small");
    if (replicates < 2) throw std::invalid_argument("BallSampler: need at least 2 replicates");
  }

  const Dims& dims() const { return d_; }
  std::size_t budget() const { return budget_; }
  int replicates() const { return replicates_; }
  double box_volume() const { return box_.volume(d_); }
  std::uint64_t evaluations() const { return budget_ * static_cast<std::uint64_t>(replicates_); }

  // Accumulates n_out integrands over the point set.  The callback writes the
  // integrand values at an accepted point y in B_1 (rho2 = rho(y)^2, psi =
  // psi(y)) into out[0..n_out); rejected points contribute zero.  Returns the
  // per-replicate integral estimates est[rep][j] (already scaled by the box
  // volume).  The callback must be pure.
  template <class F>
  std::vector<std::vector<double>> replicate_estimates(int n_out, F&& integrand) const {
    std::vector<std::vector<double>> est(static_cast<std::size_t>(replicates_));
    const int workers = std::min(worker_count(), replicates_);
    auto run_range = [&](int rep_begin, int rep_end) {
      for (int rep = rep_begin; rep < rep_end; ++rep)
        est[static_cast<std::size_t>(rep)] = run_one(rep, n_out, integrand);
    };
    if (workers <= 1) {
      run_range(0, replicates_);
    } else {
      std::vector<std::future<void>> tasks;
      const int chunk = (replicates_ + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const int b = w * chunk;
        const int e = std::min(replicates_, b + chunk);
        if (b >= e) break;
        tasks.push_back(std::async(std::launch::async, run_range, b, e));
      }
      for (auto& t : tasks) t.get();
    }
    return est;
  }

  struct Combined {
    std::vector<double> value;
    std::vector<double> err;  // standard error of the replicate mean
  };

  static Combined combine(const std::vector<std::vector<double>>& est) {
    Combined c;
    const std::size_t reps = est.size();
    const std::size_t n_out = est.empty() ? 0 : est[0].size();
    c.value.assign(n_out, 0.0);
    c.err.assign(n_out, 0.0);
    for (const auto& e : est)
      for (std::size_t j = 0; j < n_out; ++j) c.value[j] += e[j];
    for (std::size_t j = 0; j < n_out; ++j) c.value[j] /= static_cast<double>(reps);
    for (const auto& e : est)
      for (std::size_t j = 0; j < n_out; ++j) {
        const double dlt = e[j] - c.value[j];
        c.err[j] += dlt * dlt;
      }
    for (std::size_t j = 0; j < n_out; ++j)
      c.err[j] = std::sqrt(c.err[j] / (static_cast<double>(reps) * (static_cast<double>(reps) - 1.0)));
    return c;
  }

 private:
  template <class F>
  std::vector<double> run_one(int rep, int n_out, const F& integrand) const {
    const int dim = d_.n();
    SobolSequence sobol(dim);
    Rng rng = Rng(seed_).fork(static_cast<std::uint64_t>(rep) + 1);
    std::array<double, kMaxN> shift{};
    for (int i = 0; i < dim; ++i) shift[static_cast<std::size_t>(i)] = rng.next_double();

    std::vector<double> acc(static_cast<std::size_t>(n_out), 0.0);
    std::vector<double> out(static_cast<std::size_t>(n_out), 0.0);
    std::array<double, kMaxN> u{};
    Point y;
    y.z = ZVec(d_.m);
    y.t = TVec(d_.k);
    for (std::size_t i = 0; i < budget_; ++i) {
      sobol.next(u.data());
      for (int a = 0; a < dim; ++a) {
        double s = u[static_cast<std::size_t>(a)] + shift[static_cast<std::size_t>(a)];
        if (s >= 1.0) s -= 1.0;
        u[static_cast<std::size_t>(a)] = s;
      }
      for (int a = 0; a < d_.m; ++a) y.z[a] = (2.0 * u[static_cast<std::size_t>(a)] - 1.0) * box_.z_half;
      for (int b = 0; b < d_.k; ++b)
        y.t[b] = (2.0 * u[static_cast<std::size_t>(d_.m + b)] - 1.0) * box_.t_half;
      const double rho2 = gauge_sq(y, d_);
      if (rho2 >= 1.0) continue;
      const double psi = angle_psi_or_zero(y, d_);
      integrand(y, rho2, psi, out.data());
      for (int j = 0; j < n_out; ++j) acc[static_cast<std::size_t>(j)] += out[static_cast<std::size_t>(j)];
    }
    const double scale = box_volume() / static_cast<double>(budget_);
    for (auto& a : acc) a *= scale;
    return acc;
  }

  Dims d_;
  std::size_t budget_;
  int replicates_;
  std::uint64_t seed_;
  BallBox box_;
};

// ---------------------------------------------------------------------------
// Public quadrature surface.
// ---------------------------------------------------------------------------

struct WeightSpec {
  enum class Factor { none, mu, psi };
  double alpha = 0.0;
  Factor extra = Factor::none;

  WeightSpec() = default;
  WeightSpec(double a, Factor f) : alpha(a), extra(f) {
    if (!(a >= 0.0)) throw std::invalid_argument("WeightSpec: alpha must be >= 0");
  }
};

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
  std::uint64_t evaluations = 0;
  bool inconclusive = false;
};

struct QuadPolicy {
  std::size_t budget = 200000;  // points per replicate
  int replicates = 16;
  double rel_tol = 1e-3;
};

// integral_{B_r} f (r^2 - rho^2)^alpha (factor), deterministic given seed.
// f is evaluated at physical (dilated) points.
inline QuadResult integrate_ball(const std::function<double(const Point&, const Dims&)>& f,
                                 double r, const WeightSpec& w, const CoefficientField& A,
                                 const QuadPolicy& policy, std::uint64_t seed, const Dims& d) {
  if (!(r > 0.0)) throw std::invalid_argument("integrate_ball: radius must be positive");
  BallSampler sampler(d, policy.budget, policy.replicates, seed);
  const bool identity = A.is_identity();
  auto est = sampler.replicate_estimates(1, [&](const Point& y, double rho2, double psi, double* out) {
    const Point x = dilate(y, r, d);
    double factor = 1.0;
    switch (w.extra) {
      case WeightSpec::Factor::none: break;
      case WeightSpec::Factor::psi: factor = psi; break;
      case WeightSpec::Factor::mu: factor = identity ? psi : (x.is_origin() ? 0.0 : eval_mu(A, x, d)); break;
    }
    const double wgt = w.alpha == 0.0 ? 1.0 : std::pow(1.0 - rho2, w.alpha);
    out[0] = f(x, d) * wgt * factor;
  });
  const auto c = BallSampler::combine(est);
  QuadResult q;
  const double scale = std::pow(r, d.q() + 2.0 * w.alpha);
  q.value = scale * c.value[0];
  q.err_est = scale * c.err[0];
  q.evaluations = sampler.evaluations();
  const double abs_floor = 1e-8 * scale * sampler.box_volume();
  q.inconclusive = q.err_est > std::max(policy.rel_tol * std::abs(q.value), abs_floor);
  return q;
}

// Certified lower bound for sup_{B_r} |u|: best of n quasi-uniform samples,
// then a shrinking pattern search around the incumbent (never leaving B_r).
inline double sup_on_ball(const SolutionField& u, double r, std::size_t n, std::uint64_t seed,
                          const Dims& d) {
  if (!(r > 0.0)) throw std::invalid_argument("sup_on_ball: radius must be positive");
  const BallBox box = ball_box(r, d);
  const int dim = d.n();
  SobolSequence sobol(dim);
  Rng rng = Rng(seed).fork(0x5u);
  std::array<double, kMaxN> shift{};
  for (int i = 0; i < dim; ++i) shift[static_cast<std::size_t>(i)] = rng.next_double();

  Point best = Point::zero(d);
  double best_val = std::abs(u(best, d));
  double best_rho = 0.0;
  std::array<double, kMaxN> c{};
  for (std::size_t i = 0; i < n; ++i) {
    sobol.next(c.data());
    Point p;
    p.z = ZVec(d.m);
    p.t = TVec(d.k);
    for (int a = 0; a < d.m; ++a) {
      double s = c[static_cast<std::size_t>(a)] + shift[static_cast<std::size_t>(a)];
      if (s >= 1.0) s -= 1.0;
      p.z[a] = (2.0 * s - 1.0) * box.z_half;
    }
    for (int b = 0; b < d.k; ++b) {
      double s = c[static_cast<std::size_t>(d.m + b)] + shift[static_cast<std::size_t>(d.m + b)];
      if (s >= 1.0) s -= 1.0;
      p.t[b] = (2.0 * s - 1.0) * box.t_half;
    }
    const double rho = gauge(p, d);
    if (rho >= r) continue;
    const double v = std::abs(u(p, d));
    if (v > best_val) {
      best_val = v;
      best = p;
      best_rho = rho;
    }
  }

  // Pattern-search polish.  Ties in |u| are broken toward smaller gauge so
  // plateau directions still free constraint slack (the maximizer of a
  // cylindrical function can sit on the ball boundary).
  double step = 0.25;
  for (int iter = 0; step > 1e-10 && iter < 100000; ++iter) {
    bool improved = false;
    for (int a = 0; a < dim; ++a) {
      for (double sgn : {1.0, -1.0}) {
        Point q = best;
        if (a < d.m)
          q.z[a] += sgn * step * box.z_half;
        else
          q.t[a - d.m] += sgn * step * box.t_half;
        const double rho = gauge(q, d);
        if (rho >= r) continue;
        const double v = std::abs(u(q, d));
        if (v > best_val || (v == best_val && rho < best_rho)) {
          best_val = v;
          best = q;
          best_rho = rho;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.6;
  }
  return best_val;
}

}  // namespace grushin
