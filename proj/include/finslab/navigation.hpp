#pragma once

// Zermelo navigation: the datum (F, v) produces the norm F~ whose indicatrix
// is the indicatrix of F shifted by v, i.e. F~(y + F(y) v) = F(y).

#include <algorithm>
#include <cmath>
#include <string>

#include "finslab/errors.hpp"
#include "finslab/minkowski.hpp"
#include "finslab/random.hpp"
#include "finslab/report.hpp"

namespace finslab {

struct NavigationDatum {
  NormEvaluator base;
  Vector wind;

  NavigationDatum(NormEvaluator F, Vector v) : base(std::move(F)), wind(std::move(v)) { validate(); }

  /// The shifted indicatrix encloses the origin iff F(-v) < 1. For a
  /// reversible base this is the familiar F(v) < 1.
  void validate() const {
    base.require_dim(wind);
    const double reach = base(-wind);
    if (!(reach < 1.0)) throw WindTooStrong("F(-v) = " + std::to_string(reach) + " must be < 1");
  }
};

namespace detail {

inline void check_wind_reach(const Matrix& h, const Vector& W) {
  const double len = std::sqrt(W.dot(h * W));
  if (!(len < 1.0)) throw WindTooStrong("|W|_h = " + std::to_string(len) + " must be < 1");
}

/// Randers norm of the Riemannian datum (h, W): alpha = (lambda h + W_b W_b^T) / lambda^2,
/// beta = -W_b / lambda, with W_b = h W and lambda = 1 - |W|_h^2.
inline NormEvaluator randers_from_riemannian(const Matrix& h, const Vector& W) {
  check_wind_reach(h, W);
  const Vector Wb = h * W;
  const double lambda = 1.0 - W.dot(Wb);
  Matrix alpha = (lambda * h + Wb * Wb.transpose()) / (lambda * lambda);
  alpha = 0.5 * (alpha + alpha.transpose());
  return NormEvaluator::randers(std::move(alpha), -Wb / lambda);
}

}  // namespace detail

/// Riemannian navigation datum (h, W) of a Randers norm alpha + beta:
/// h = eps (a - b b^T), W = -a^{-1} b / eps, eps = 1 - |b|_a^2.
/// A quadratic norm maps to itself with W = 0.
struct RiemannianDatum {
  Matrix h;
  Vector W;
};

inline RiemannianDatum riemannian_datum(const NormEvaluator& N) {
  if (N.is_quadratic()) return {N.alpha(), Vector::Zero(N.dim())};
  const Matrix& a = N.alpha();
  const Vector& b = N.beta();
  const Vector b_up = a.ldlt().solve(b);
  const double eps = 1.0 - b.dot(b_up);
  Matrix h = eps * (a - b * b.transpose());
  h = 0.5 * (h + h.transpose());
  return {std::move(h), -b_up / eps};
}

/// Closed form F~(y~) = (sqrt(lambda F^2 + <W,y~>^2) - <W,y~>) / lambda for quadratic F.
inline double navigate_closed_form(const NavigationDatum& datum, const Vector& yt) {
  const Matrix& h = datum.base.alpha();
  const Vector& W = datum.wind;
  const double lambda = 1.0 - W.dot(h * W);
  const double w = W.dot(h * yt);
  const double F2 = yt.dot(h * yt);
  return (std::sqrt(lambda * F2 + w * w) - w) / lambda;
}

/// General branch: the unique s > 0 with F(y~ - s v) = s. s -> F(y~ - s v) - s
/// is positive at 0 and eventually negative, so bisection on a bracket grown
/// by doubling is safe; Newton polishes the root.
inline double navigate_scalar_solve(const NavigationDatum& datum, const Vector& yt) {
  const NormEvaluator& F = datum.base;
  const Vector& v = datum.wind;
  datum.base.require_dim(yt);
  if (yt.squaredNorm() == 0.0) return 0.0;
  auto phi = [&](double s) { return F(Vector(yt - s * v)) - s; };

  double lo = 0.0;
  double hi = F(yt) / (1.0 - F(-v));
  while (phi(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) > 0.0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const Vector z = yt - s * v;
    if (z.squaredNorm() == 0.0) break;
    std::vector<Dual<double>> zd(static_cast<std::size_t>(z.size()));
    for (Eigen::Index k = 0; k < z.size(); ++k) zd[static_cast<std::size_t>(k)] = Dual<double>(z(k), -v(k));
    const Dual<double> Fd = F.evaluate<Dual<double>>(zd);
    const double g = Fd.v - s, dg = Fd.d - 1.0;
    if (dg == 0.0) break;
    const double next = s - g / dg;
    if (!(next > lo * 0.5 && next < hi * 2.0)) break;
    s = next;
  }
  return s;
}

/// F~(y~) for the datum. Quadratic bases use the closed Randers formula,
/// others the scalar solve; both agree on quadratic bases.
inline double navigate(const NavigationDatum& datum, const Vector& yt) {
  datum.base.require_dim(yt);
  if (yt.squaredNorm() == 0.0) return 0.0;
  if (datum.base.is_quadratic()) return navigate_closed_form(datum, yt);
  return navigate_scalar_solve(datum, yt);
}

/// The navigated norm as an explicit evaluator. Navigation composes by
/// adding winds (the indicatrix shifts add), so a Randers base is first
/// reduced to its Riemannian datum and the result is again Randers.
inline NormEvaluator navigated_norm(const NavigationDatum& datum) {
  RiemannianDatum rd = riemannian_datum(datum.base);
  const Vector W = rd.W + datum.wind;
  if (W.squaredNorm() == 0.0) return NormEvaluator::quadratic(rd.h);
  return detail::randers_from_riemannian(rd.h, W);
}

/// Undo navigation by v: the datum (F~, -v) recovers F.
inline NormEvaluator invert_navigation(const NormEvaluator& randers, const Vector& v) {
  return navigated_norm(NavigationDatum(randers, -v));
}

/// Per-sample deviations of the navigation inner-product identity for
/// F-unit y and u in the g^F_y-complement of y:
///   |<u,u>_y (1 - <y~,v>~_y~) - <u,u>~_y~|  and
///   |<u,u>~_y~ - <u,u>_y / (1 + <y,v>_y)|, reported as their max.
struct NavigationLemmaSample {
  double identity_deviation = 0.0;
  double corollary_deviation = 0.0;
  double lhs_uu = 0.0;  // <u,u>_y
  double rhs_uu = 0.0;  // <u,u>~_y~
};

inline NavigationLemmaSample navigation_lemma_sample(const NavigationDatum& datum, const NormEvaluator& navigated,
                                                     Vector y, Vector u) {
  const NormEvaluator& F = datum.base;
  const Vector& v = datum.wind;
  const double Fy = F(y);
  if (!(Fy > 0.0)) throw ZeroBaseVector("navigation lemma needs y != 0");
  y /= Fy;
  const InnerProductAtY gy = fundamental_tensor(F, y);
  u -= (gy(u, y) / gy(y, y)) * y;  // one Gram-Schmidt step in g_y

  const Vector yt = y + v;
  const InnerProductAtY gt = fundamental_tensor(navigated, yt);
  NavigationLemmaSample s;
  s.lhs_uu = gy(u, u);
  s.rhs_uu = gt(u, u);
  s.identity_deviation = std::abs(s.lhs_uu * (1.0 - gt(yt, v)) - s.rhs_uu);
  s.corollary_deviation = std::abs(s.rhs_uu - s.lhs_uu / (1.0 + gy(y, v)));
  return s;
}

/// Runs the identity on (y, u) and then samples-1 further random pairs.
inline VerificationReport check_navigation_lemma(const NavigationDatum& datum, const Vector& y, const Vector& u,
                                                 int samples, std::uint64_t seed = 1, double tol = 1e-8) {
  const NormEvaluator navigated = navigated_norm(datum);
  VerificationReport rep("navigation-lemma", tol);
  const int n = datum.base.dim();
  for (int i = 0; i < std::max(samples, 1); ++i) {
    Vector yi = y, ui = u;
    if (i > 0) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      yi = rng.unit_vector(n);
      ui = rng.normal_vector(n);
    }
    const NavigationLemmaSample s = navigation_lemma_sample(datum, navigated, yi, ui);
    rep.add(std::max(s.identity_deviation, s.corollary_deviation));
  }
  rep.finish();
  return rep;
}

}  // namespace finslab
