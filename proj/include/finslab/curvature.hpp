#pragma once

// Geodesic spray, Riemann curvature and flag curvature of a chart-local
// Finsler metric. y-derivatives are exact (nested duals); x-derivatives are
// central differences of the pointwise norms.

#include <chrono>
#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "finslab/dual.hpp"
#include "finslab/errors.hpp"
#include "finslab/linalg.hpp"
#include "finslab/minkowski.hpp"
#include "finslab/parallel.hpp"
#include "finslab/random.hpp"
#include "finslab/report.hpp"
#include "finslab/sphere.hpp"

namespace finslab {

inline constexpr double kChartStep = 1e-4;

/// Pointwise norms at x and at x +- step e_k.
struct SprayStencil {
  double step = kChartStep;
  NormEvaluator center;
  std::vector<NormEvaluator> plus, minus;
};

inline SprayStencil spray_stencil(const MetricField& metric, const Vector& x, double step = kChartStep) {
  const int n = metric.dim();
  if (x.size() != n) throw DimensionMismatch("chart point has wrong dimension");
  if (!metric.chart().contains(x)) throw ChartBoundary("|x| = " + std::to_string(x.norm()) + " outside chart");
  if (x.norm() + step >= metric.chart().radius())
    throw DifferentiationFailure("difference stencil leaves the chart");
  SprayStencil st;
  st.step = step;
  st.center = metric.norm_at(x);
  st.plus.reserve(n);
  st.minus.reserve(n);
  for (int k = 0; k < n; ++k) {
    st.plus.push_back(metric.norm_at(x + step * Vector::Unit(n, k)));
    st.minus.push_back(metric.norm_at(x - step * Vector::Unit(n, k)));
  }
  return st;
}

namespace detail {

template <class S>
S half_f2(const NormEvaluator& N, std::span<const S> y) {
  if (N.is_quadratic()) {
    S q = 0.0;
    for (int i = 0; i < N.dim(); ++i) {
      S row = 0.0;
      for (int j = 0; j < N.dim(); ++j) row += N.alpha()(i, j) * y[j];
      q += y[i] * row;
    }
    return 0.5 * q;
  }
  S F = N.evaluate<S>(y);
  return 0.5 * (F * F);
}

template <class S>
std::vector<S> half_f2_grad(const NormEvaluator& N, std::span<const S> y) {
  if (!N.is_quadratic()) return half_f2_gradient<S>(N, y);
  std::vector<S> g(static_cast<std::size_t>(N.dim()), S(0.0));
  for (int i = 0; i < N.dim(); ++i)
    for (int j = 0; j < N.dim(); ++j) g[i] += N.alpha()(i, j) * y[j];
  return g;
}

template <class S>
SquareOf<S> half_f2_hess(const NormEvaluator& N, std::span<const S> y) {
  if (!N.is_quadratic()) return half_f2_hessian<S>(N, y);
  SquareOf<S> H(N.dim());
  for (int i = 0; i < N.dim(); ++i)
    for (int j = 0; j < N.dim(); ++j) H(i, j) = S(N.alpha()(i, j));
  return H;
}

}  // namespace detail

/// G^i = 1/4 g^{il} ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}) over any scalar type,
/// so that it can be differentiated in y by nesting duals.
template <class S>
std::vector<S> geodesic_spray(const SprayStencil& st, std::span<const S> y) {
  const int n = st.center.dim();
  const double h2 = 2.0 * st.step;
  std::vector<S> rhs(static_cast<std::size_t>(n), S(0.0));
  for (int k = 0; k < n; ++k) {
    const std::vector<S> gp = detail::half_f2_grad<S>(st.plus[k], y);
    const std::vector<S> gm = detail::half_f2_grad<S>(st.minus[k], y);
    for (int l = 0; l < n; ++l) rhs[l] += y[k] * ((gp[l] - gm[l]) / h2);
    rhs[k] -= (detail::half_f2<S>(st.plus[k], y) - detail::half_f2<S>(st.minus[k], y)) / h2;
  }
  std::vector<S> G = solve_spd<S>(detail::half_f2_hess<S>(st.center, y), std::move(rhs));
  for (S& g : G) g *= 0.5;
  return G;
}

inline Vector geodesic_spray(const MetricField& metric, const Vector& x, const Vector& y) {
  if (y.squaredNorm() == 0.0) return Vector::Zero(metric.dim());
  const SprayStencil st = spray_stencil(metric, x);
  const std::vector<double> ys = to_std(y);
  return to_eigen(geodesic_spray<double>(st, std::span<const double>(ys)));
}

namespace detail {

/// J(i,k) = dG^i/dy^k.
inline Matrix spray_jacobian(const SprayStencil& st, const Vector& y) {
  using D = Dual<double>;
  const int n = static_cast<int>(y.size());
  Matrix J(n, n);
  std::vector<D> yd(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < n; ++a) yd[a] = D(y(a), a == k ? 1.0 : 0.0);
    const std::vector<D> G = geodesic_spray<D>(st, std::span<const D>(yd));
    for (int i = 0; i < n; ++i) J(i, k) = G[i].d;
  }
  return J;
}

inline SprayStencil stencil_or_fail(const MetricField& metric, const Vector& x) {
  if (!metric.chart().contains(x)) throw DifferentiationFailure("curvature stencil leaves the chart");
  return spray_stencil(metric, x);
}

}  // namespace detail

/// R^i_k(y) = 2 d_{x^k} G^i - y^j d_{x^j} d_{y^k} G^i + 2 G^j d_{y^j} d_{y^k} G^i
///            - d_{y^j} G^i d_{y^k} G^j.
inline Matrix riemann_curvature(const MetricField& metric, const Vector& x, const Vector& y) {
  using D1 = Dual<double>;
  using D2 = Dual<D1>;
  const int n = metric.dim();
  if (y.size() != n) throw DimensionMismatch("flagpole has wrong dimension");
  if (y.squaredNorm() == 0.0) throw ZeroBaseVector("riemann curvature needs y != 0");
  const double h = kChartStep;
  const SprayStencil st = spray_stencil(metric, x);
  const std::vector<double> ys = to_std(y);
  const Vector G0 = to_eigen(geodesic_spray<double>(st, std::span<const double>(ys)));

  // inner seed e_k gives d_{y^k}; outer seed G0 gives G^j d_{y^j}
  Matrix J(n, n), GJ(n, n);
  std::vector<D2> yd(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < n; ++a) yd[a] = D2(D1(y(a), a == k ? 1.0 : 0.0), D1(G0(a), 0.0));
    const std::vector<D2> G = geodesic_spray<D2>(st, std::span<const D2>(yd));
    for (int i = 0; i < n; ++i) {
      J(i, k) = G[i].v.d;
      GJ(i, k) = G[i].d.d;
    }
  }

  Matrix dxG(n, n);
  for (int k = 0; k < n; ++k) {
    const Vector e = h * Vector::Unit(n, k);
    const SprayStencil sp = detail::stencil_or_fail(metric, x + e);
    const SprayStencil sm = detail::stencil_or_fail(metric, x - e);
    const Vector Gp = to_eigen(geodesic_spray<double>(sp, std::span<const double>(ys)));
    const Vector Gm = to_eigen(geodesic_spray<double>(sm, std::span<const double>(ys)));
    dxG.col(k) = (Gp - Gm) / (2.0 * h);
  }

  const double ylen = y.norm();
  const Vector dir = h * y / ylen;
  const Matrix Jp = detail::spray_jacobian(detail::stencil_or_fail(metric, x + dir), y);
  const Matrix Jm = detail::spray_jacobian(detail::stencil_or_fail(metric, x - dir), y);
  const Matrix ydxJ = (Jp - Jm) * (ylen / (2.0 * h));

  return 2.0 * dxG - ydxJ + 2.0 * GJ - J * J;
}

struct Flag {
  Vector x;
  Vector y;  // flagpole
  Vector v;  // transverse edge
};

/// K(x, y, span{y,v}) = g_y(R_y v, v) / (g_y(y,y) g_y(v,v) - g_y(y,v)^2),
/// evaluated after making y F-unit and v g_y-orthogonal to it.
inline double flag_curvature(const MetricField& metric, const Flag& flag) {
  const NormEvaluator N = metric.norm_at(flag.x);
  const double Fy = N(flag.y);
  if (!(Fy > 0.0)) throw ZeroBaseVector("flag needs y != 0");
  const Vector y = flag.y / Fy;
  const InnerProductAtY g = fundamental_tensor(N, y);
  const double vv0 = g(flag.v, flag.v);
  if (!(vv0 > 0.0)) throw DegenerateFlag("v = 0");
  const Vector v = flag.v - g(flag.v, y) * y;
  const double vv = g(v, v);
  if (!(vv / vv0 > 1e-12)) throw DegenerateFlag("y and v are linearly dependent");
  const Matrix R = riemann_curvature(metric, flag.x, y);
  return g(R * v, v) / vv;
}

/// Random flags at random sphere points (chart re-centered on each point);
/// deviation |K - expected| per flag.
inline VerificationReport check_flag_curvature(const MetricField& metric, int samples, std::uint64_t seed = 1,
                                               double tol = 1e-4, double expected = 1.0) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep("flag-curvature", tol);
  const int n = metric.dim();
  std::vector<double> K(static_cast<std::size_t>(std::max(samples, 0)));
  parallel_for(K.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    MetricField m = metric;
    Vector x;
    if (metric.chart().is_flat()) {
      x = rng.uniform(0.0, 1.0) * rng.unit_vector(n);
    } else {
      m = metric.recentered(rng.unit_vector(metric.chart().ambient_dim()));
      x = rng.uniform(0.0, 0.5) * rng.unit_vector(n);
    }
    Flag f{x, rng.normal_vector(n), rng.normal_vector(n)};
    K[i] = flag_curvature(m, f);
  });
  double kmin = expected, kmax = expected;
  for (double k : K) {
    rep.add(std::abs(k - expected));
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
  }
  rep.details = Json{{"expected", expected}, {"min_K", K.empty() ? expected : kmin}, {"max_K", K.empty() ? expected : kmax}};
  rep.finish();
  rep.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// One output sample of integrate_geodesic. (x, y) are coordinates in
/// charts[chart_index]; point and velocity are ambient.
struct GeodesicPoint {
  double t = 0.0;
  Vector x, y;
  double F = 0.0;
  Vector point, velocity;
  int chart_index = 0;
};

struct GeodesicCurve {
  std::vector<GeodesicPoint> points;
  std::vector<Chart> charts;
};

/// RK4 for c'' + 2 G(c, c') = 0 with fixed step T/steps. The chart is
/// re-centered on the current point whenever |x| exceeds recenter_at.
inline GeodesicCurve integrate_geodesic(const MetricField& metric, const Vector& x0, const Vector& y0, double T,
                                        int steps, double recenter_at = 1.0) {
  if (steps < 1) throw DimensionMismatch("integrate_geodesic needs steps >= 1");
  MetricField m = metric;
  const double F0 = m.norm_at(x0)(y0);
  if (!(F0 > 0.0)) throw ZeroBaseVector("initial velocity is zero");
  Vector x = x0, y = y0 / F0;
  const double dt = T / steps;
  const bool flat = metric.chart().is_flat();

  GeodesicCurve curve;
  curve.charts.push_back(m.chart());
  auto record = [&](double t) {
    GeodesicPoint p;
    p.t = t;
    p.x = x;
    p.y = y;
    p.F = m.norm_at(x)(y);
    p.point = m.chart().to_sphere(x);
    p.velocity = m.chart().push_vector(x, y);
    p.chart_index = static_cast<int>(curve.charts.size()) - 1;
    curve.points.push_back(std::move(p));
  };
  auto accel = [&](const Vector& xs, const Vector& ys) -> Vector { return -2.0 * geodesic_spray(m, xs, ys); };

  record(0.0);
  for (int s = 1; s <= steps; ++s) {
    const Vector k1x = y, k1y = accel(x, y);
    const Vector k2x = y + 0.5 * dt * k1y, k2y = accel(x + 0.5 * dt * k1x, k2x);
    const Vector k3x = y + 0.5 * dt * k2y, k3y = accel(x + 0.5 * dt * k2x, k3x);
    const Vector k4x = y + dt * k3y, k4y = accel(x + dt * k3x, k4x);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    if (!flat && x.norm() > recenter_at) {
      const Vector p = m.chart().to_sphere(x);
      const Vector w = m.chart().push_vector(x, y);
      m = m.recentered(p);
      x = Vector::Zero(x.size());
      y = m.chart().pull_vector(x, w);
      curve.charts.push_back(m.chart());
    }
    record(s * dt);
  }
  return curve;
}

/// CSV columns t, x1..xn, y1..yn, F (chart coordinates of each row's chart).
inline void write_geodesic_csv(std::ostream& out, const GeodesicCurve& curve) {
  if (curve.points.empty()) return;
  const auto n = curve.points.front().x.size();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",y" << i;
  out << ",F\n";
  out.precision(17);
  for (const GeodesicPoint& p : curve.points) {
    out << p.t;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << p.x(i);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << p.y(i);
    out << ',' << p.F << '\n';
  }
}

}  // namespace finslab
