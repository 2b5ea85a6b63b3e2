#pragma once

// Functions on S^n, their nonlinear gradient and Laplacian for a Finsler
// metric, level-set sampling, and the checks built on them: transnormality,
// isoparametricity, tangency of the wind, principal curvatures, and the
// geodesic property of the unit normal field.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "finslab/clifford.hpp"
#include "finslab/curvature.hpp"
#include "finslab/errors.hpp"
#include "finslab/minkowski.hpp"
#include "finslab/parallel.hpp"
#include "finslab/random.hpp"
#include "finslab/report.hpp"
#include "finslab/sphere.hpp"

namespace finslab {

/// A smooth function on the unit sphere, given by a polynomial (or other)
/// extension to R^{n+1} together with its Euclidean gradient.
class SphereFunction {
 public:
  enum class Kind { otfkm, height, custom };
  using Rule = std::function<double(const Vector&)>;
  using Gradient = std::function<Vector(const Vector&)>;

  static SphereFunction otfkm(CliffordSystem sys) {
    auto shared = std::make_shared<const CliffordSystem>(std::move(sys));
    SphereFunction f;
    f.kind_ = Kind::otfkm;
    f.name_ = "otfkm";
    f.ambient_ = shared->dim();
    f.clifford_ = shared;
    f.rule_ = [shared](const Vector& p) { return otfkm_value(*shared, p); };
    f.grad_ = [shared](const Vector& p) { return otfkm_gradient(*shared, p); };
    return f;
  }

  static SphereFunction height(Vector axis) {
    const double len = axis.norm();
    if (!(len > 0.0)) throw DimensionMismatch("height axis must be nonzero");
    axis /= len;
    SphereFunction f;
    f.kind_ = Kind::height;
    f.name_ = "height";
    f.ambient_ = static_cast<int>(axis.size());
    f.rule_ = [axis](const Vector& p) { return axis.dot(p); };
    f.grad_ = [axis](const Vector&) { return axis; };
    return f;
  }

  /// Height along the last coordinate of R^{n+1}.
  static SphereFunction height(int n) { return height(Vector::Unit(n + 1, n)); }

  static SphereFunction custom(std::string name, int ambient_dim, Rule rule, Gradient grad) {
    SphereFunction f;
    f.kind_ = Kind::custom;
    f.name_ = std::move(name);
    f.ambient_ = ambient_dim;
    f.rule_ = std::move(rule);
    f.grad_ = std::move(grad);
    return f;
  }

  /// |u|^2 - |v|^2 for p = (u, v) in R^p x R^q; two distinct principal curvatures.
  static SphereFunction two_block(int p, int q) {
    if (p < 1 || q < 1) throw DimensionMismatch("two_block needs p, q >= 1");
    return custom("two-block", p + q,
                  [p](const Vector& x) { return x.head(p).squaredNorm() - x.tail(x.size() - p).squaredNorm(); },
                  [p](const Vector& x) {
                    Vector g = 2.0 * x;
                    g.tail(x.size() - p) *= -1.0;
                    return g;
                  });
  }

  SphereFunction negated() const {
    SphereFunction f = *this;
    f.sign_ = -sign_;
    return f;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int ambient_dim() const { return ambient_; }
  double sign() const { return sign_; }
  const CliffordSystem* clifford() const { return clifford_.get(); }

  double operator()(const Vector& p) const {
    require(p);
    return sign_ * rule_(p);
  }

  Vector ambient_gradient(const Vector& p) const {
    require(p);
    return sign_ * grad_(p);
  }

  /// Gradient for the round metric: tangential part of the ambient gradient.
  Vector sphere_gradient(const Vector& p) const {
    Vector g = ambient_gradient(p);
    return g - g.dot(p) * p;
  }

  /// Chart covector df at x.
  Vector chart_differential(const Chart& chart, const Vector& x) const {
    return chart.push_matrix(x).transpose() * ambient_gradient(chart.to_sphere(x));
  }

 private:
  void require(const Vector& p) const {
    if (p.size() != ambient_) throw DimensionMismatch("function on R^" + std::to_string(ambient_) +
                                                      " evaluated on a vector of length " + std::to_string(p.size()));
  }

  Kind kind_ = Kind::custom;
  std::string name_;
  int ambient_ = 0;
  double sign_ = 1.0;
  Rule rule_;
  Gradient grad_;
  std::shared_ptr<const CliffordSystem> clifford_;
};

inline constexpr double kCriticalTol = 1e-10;

/// The vector dual to df under the norm at x: g_{grad f}(grad f, v) = df(v).
inline Vector nonlinear_gradient(const MetricField& metric, const SphereFunction& f, const Vector& x) {
  const Vector xi = f.chart_differential(metric.chart(), x);
  if (xi.norm() < kCriticalTol) throw CriticalPoint("df vanishes at x");
  return legendre_solve(metric.norm_at(x), xi);
}

/// Continuous extension by zero across the critical set.
inline Vector nonlinear_gradient_extended(const MetricField& metric, const SphereFunction& f, const Vector& x) {
  const Vector xi = f.chart_differential(metric.chart(), x);
  if (xi.norm() < kCriticalTol) return Vector::Zero(metric.dim());
  return legendre_solve(metric.norm_at(x), xi);
}

/// F-unit normal grad f / F(grad f) in chart coordinates.
inline Vector unit_normal(const MetricField& metric, const SphereFunction& f, const Vector& x) {
  const Vector g = nonlinear_gradient(metric, f, x);
  return g / metric.norm_at(x)(g);
}

/// Laplace-Beltrami of f for the localization metric x' -> g_{grad f(x')}(x'):
/// (1/sqrt det G) d_i (sqrt det G grad f^i), since G^{-1} df = grad f.
inline double nonlinear_laplacian(const MetricField& metric, const SphereFunction& f, const Vector& x,
                                  double step = kChartStep) {
  const int n = metric.dim();
  auto flux = [&](const Vector& xp, bool center) -> std::pair<Vector, double> {
    if (!metric.chart().contains(xp)) throw StencilEscape("Laplacian stencil leaves the chart");
    const Vector xi = f.chart_differential(metric.chart(), xp);
    if (xi.norm() < kCriticalTol) {
      if (center) throw CriticalPoint("df vanishes at x");
      throw StencilEscape("Laplacian stencil touches a critical point");
    }
    const NormEvaluator N = metric.norm_at(xp);
    Vector V = legendre_solve(N, xi);
    const double vol = std::sqrt(fundamental_tensor(N, V).G.determinant());
    return {std::move(V), vol};
  };
  const double vol0 = flux(x, true).second;
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector e = step * Vector::Unit(n, i);
    const auto [Vp, vp] = flux(x + e, false);
    const auto [Vm, vm] = flux(x - e, false);
    div += (vp * Vp(i) - vm * Vm(i)) / (2.0 * step);
  }
  return div / vol0;
}

struct LevelSetSample {
  Vector point;
  double f_value = 0.0;
  Vector h_gradient;  // ambient, tangent to the sphere
  Vector F_gradient;  // chart vector at the chart centered on point; empty without a metric
  double weight = 1.0;
};

namespace detail {

/// Newton along grad^h f from p toward f = c, halving the step until |f - c|
/// decreases. Returns false if the iteration stalls or lands on a critical point.
inline bool project_to_level(const SphereFunction& f, double c, Vector& p) {
  for (int iter = 0; iter < 60; ++iter) {
    const double r = f(p) - c;
    const Vector g = f.sphere_gradient(p);
    if (std::abs(r) <= 1e-12) return g.norm() > 1e-6;
    const double g2 = g.squaredNorm();
    if (g2 < 1e-24) return false;
    const Vector step = (-r / g2) * g;
    bool accepted = false;
    for (double t = 1.0; t > 1e-6; t *= 0.5) {
      Vector q = p + t * step;
      q /= q.norm();
      if (std::abs(f(q) - c) < std::abs(r)) {
        p = std::move(q);
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  return std::abs(f(p) - c) <= 1e-10 && f.sphere_gradient(p).norm() > 1e-6;
}

}  // namespace detail

/// count points with |f - c| < 1e-10, from random starts projected by
/// Newton. Sample i depends only on (seed, i).
inline std::vector<LevelSetSample> sample_level_set(const SphereFunction& f, double c, int count,
                                                    std::uint64_t seed, int attempts_per_point = 100) {
  std::vector<LevelSetSample> out(static_cast<std::size_t>(std::max(count, 0)));
  std::vector<char> ok(out.size(), 0);
  parallel_for(out.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    for (int a = 0; a < attempts_per_point; ++a) {
      Vector p = rng.unit_vector(f.ambient_dim());
      if (!detail::project_to_level(f, c, p)) continue;
      out[i].point = p;
      out[i].f_value = f(p);
      out[i].h_gradient = f.sphere_gradient(p);
      ok[i] = 1;
      return;
    }
  });
  for (char o : ok)
    if (!o) throw EmptyLevel("no point found on the level f = " + std::to_string(c));
  return out;
}

/// Fills F_gradient at each sample (chart centered on the sample).
inline void attach_gradients(const MetricField& metric, std::vector<LevelSetSample>& samples,
                             const SphereFunction& f) {
  parallel_for(samples.size(), [&](std::size_t i) {
    const MetricField m = metric.recentered(samples[i].point);
    samples[i].F_gradient = nonlinear_gradient(m, f, Vector::Zero(m.dim()));
  });
}

namespace detail {

inline std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

inline void require_sphere_metric(const MetricField& metric, const SphereFunction& f) {
  if (metric.chart().is_flat()) throw DimensionMismatch("level-set checks need a sphere metric");
  if (metric.chart().ambient_dim() != f.ambient_dim()) throw DimensionMismatch("metric and function dimensions differ");
}

}  // namespace detail

/// Spread of F(grad f) on each level; the level means are the profile a(c).
inline VerificationReport check_transnormal(const MetricField& metric, const SphereFunction& f,
                                            const std::vector<double>& levels, int per_level, std::uint64_t seed = 1,
                                            double tol = 1e-6) {
  const auto start = std::chrono::steady_clock::now();
  detail::require_sphere_metric(metric, f);
  VerificationReport rep("transnormal", tol);
  double riemannian_gap = 0.0;
  std::size_t total = 0;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto pts = sample_level_set(f, levels[li], per_level, derive_seed(seed, 1000 + li));
    std::vector<double> values(pts.size()), gaps(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const MetricField m = metric.recentered(pts[i].point);
      const Vector x = Vector::Zero(m.dim());
      values[i] = m.norm_at(x)(nonlinear_gradient(m, f, x));
      gaps[i] = std::abs(values[i] - pts[i].h_gradient.norm());
    });
    rep.levels.push_back(VerificationReport::level_stats(levels[li], values));
    for (double gap : gaps) riemannian_gap = std::max(riemannian_gap, gap);
    total += values.size();
  }
  rep.details = Json{{"function", f.name()}, {"sign", f.sign()}, {"max_gap_to_round_gradient", riemannian_gap}};
  rep.finish();
  rep.n_samples = total;
  rep.wall_time_ms = detail::elapsed_ms(start);
  return rep;
}

/// Spread of the nonlinear Laplacian on each level, for f and (optionally) -f.
/// Levels of -f are reported at their own values -c.
inline VerificationReport check_isoparametric(const MetricField& metric, const SphereFunction& f,
                                              const std::vector<double>& levels, int per_level,
                                              std::uint64_t seed = 1, double tol = 1e-3, bool include_negation = true) {
  const auto start = std::chrono::steady_clock::now();
  detail::require_sphere_metric(metric, f);
  VerificationReport rep("isoparametric", tol);
  const SphereFunction g = f.negated();
  std::vector<std::vector<double>> lap_f(levels.size()), lap_g(levels.size());
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto pts = sample_level_set(f, levels[li], per_level, derive_seed(seed, 1000 + li));
    lap_f[li].resize(pts.size());
    lap_g[li].resize(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const MetricField m = metric.recentered(pts[i].point);
      const Vector x = Vector::Zero(m.dim());
      lap_f[li][i] = nonlinear_laplacian(m, f, x);
      if (include_negation) lap_g[li][i] = nonlinear_laplacian(m, g, x);
    });
  }
  std::size_t total = 0;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    rep.levels.push_back(VerificationReport::level_stats(levels[li], lap_f[li]));
    total += lap_f[li].size();
  }
  if (include_negation)
    for (std::size_t li = 0; li < levels.size(); ++li) {
      rep.levels.push_back(VerificationReport::level_stats(-levels[li], lap_g[li]));
      total += lap_g[li].size();
    }
  rep.details = Json{{"function", f.name()}, {"sign", f.sign()}, {"negation_checked", include_negation}};
  rep.finish();
  rep.n_samples = total;
  rep.wall_time_ms = detail::elapsed_ms(start);
  return rep;
}

/// |df(W p)| at random sphere points: zero iff the flow of W preserves f.
inline VerificationReport check_tangency(const SphereFunction& f, const KillingField& W, int samples,
                                         std::uint64_t seed = 1, double tol = 1e-8) {
  const auto start = std::chrono::steady_clock::now();
  if (W.ambient_dim() != f.ambient_dim()) throw DimensionMismatch("Killing field and function dimensions differ");
  VerificationReport rep("tangency", tol);
  std::vector<double> dev(static_cast<std::size_t>(std::max(samples, 0)));
  parallel_for(dev.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const Vector p = rng.unit_vector(f.ambient_dim());
    dev[i] = std::abs(f.ambient_gradient(p).dot(W.at(p)));
  });
  for (double d : dev) rep.add(d);
  rep.details = Json{{"function", f.name()}, {"killing_norm", killing_norm(W)}};
  rep.finish();
  rep.wall_time_ms = detail::elapsed_ms(start);
  return rep;
}

struct Cluster {
  double value = 0.0;  // mean of the member eigenvalues
  int multiplicity = 0;
};

/// Splits sorted eigenvalues wherever consecutive values differ by more than
/// rel_gap * max(1, max |kappa|). The same split must come out at half and
/// double the gap, else the clustering is ambiguous.
inline std::vector<Cluster> cluster_eigenvalues(std::vector<double> eig, double rel_gap = 1e-2) {
  std::sort(eig.begin(), eig.end());
  double scale = 1.0;
  for (double e : eig) scale = std::max(scale, std::abs(e));
  auto split = [&](double gap) {
    std::vector<Cluster> out;
    double sum = 0.0;
    for (std::size_t i = 0; i < eig.size(); ++i) {
      if (i > 0 && eig[i] - eig[i - 1] > gap) {
        out.back().value = sum / out.back().multiplicity;
        sum = 0.0;
      }
      if (out.empty() || (i > 0 && eig[i] - eig[i - 1] > gap)) out.push_back({0.0, 0});
      out.back().multiplicity += 1;
      sum += eig[i];
    }
    if (!out.empty()) out.back().value = sum / out.back().multiplicity;
    return out;
  };
  const double gap = rel_gap * scale;
  std::vector<Cluster> mid = split(gap);
  if (split(0.5 * gap).size() != mid.size() || split(2.0 * gap).size() != mid.size())
    throw ClusterAmbiguity("eigenvalue clusters change within a factor 2 of the gap threshold");
  return mid;
}

/// Shape operator of the level set through x for the localization metric
/// G(x') = g_{grad f(x')}(x'): A = -Q^T Hess_G f Q / |df|_G, Q a G-orthonormal
/// basis of ker df. Hessian and Christoffel symbols by central differences.
inline std::vector<double> shape_operator_eigenvalues(const MetricField& metric, const SphereFunction& f,
                                                      const Vector& x, double step = kChartStep) {
  const int n = metric.dim();
  auto localization = [&](const Vector& xp) {
    const Vector xi = f.chart_differential(metric.chart(), xp);
    if (xi.norm() < kCriticalTol) throw StencilEscape("shape-operator stencil touches a critical point");
    const NormEvaluator N = metric.norm_at(xp);
    return fundamental_tensor(N, legendre_solve(N, xi)).G;
  };
  const Vector df = f.chart_differential(metric.chart(), x);
  if (df.norm() < kCriticalTol) throw CriticalPoint("df vanishes at x");
  const Matrix G = localization(x);
  const Matrix Ginv = G.inverse();

  Matrix H(n, n);
  std::vector<Matrix> dG(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Vector e = step * Vector::Unit(n, k);
    H.col(k) = (f.chart_differential(metric.chart(), x + e) - f.chart_differential(metric.chart(), x - e)) / (2.0 * step);
    dG[k] = (localization(x + e) - localization(x - e)) / (2.0 * step);
  }
  H = 0.5 * (H + H.transpose());

  // Hess_ij = d_ij f - Gamma^k_ij d_k f, Gamma^k_ij = 1/2 G^{kl}(d_i G_jl + d_j G_il - d_l G_ij)
  const Vector up = Ginv * df;
  Matrix Hess = H;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) s += up(l) * (dG[i](j, l) + dG[j](i, l) - dG[l](i, j));
      Hess(i, j) -= 0.5 * s;
    }

  // Euclidean complement of df, then G-orthonormalized
  Eigen::HouseholderQR<Matrix> qr(df);
  const Matrix B = Matrix(qr.householderQ()).rightCols(n - 1);
  const Matrix S = B.transpose() * G * B;
  const Matrix Linv = Eigen::LLT<Matrix>(S).matrixL().solve(Matrix::Identity(n - 1, n - 1));
  const Matrix Q = B * Linv.transpose();
  const double df_norm = std::sqrt(df.dot(up));
  Matrix A = -(Q.transpose() * Hess * Q) / df_norm;
  A = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return to_std(es.eigenvalues());
}

struct SpectrumPoint {
  Vector point;
  std::vector<double> eigenvalues;
  std::vector<Cluster> clusters;
};

struct PrincipalSpectrum {
  double level = 0.0;
  int g = 0;                        // distinct principal curvatures at the first point
  std::vector<int> multiplicities;  // in increasing eigenvalue order
  bool stable = true;               // same (g, multiplicities) at every point
  std::vector<SpectrumPoint> points;
};

inline PrincipalSpectrum principal_curvature_spectrum(const MetricField& metric, const SphereFunction& f, double c,
                                                      int points, std::uint64_t seed = 1, double rel_gap = 1e-2) {
  detail::require_sphere_metric(metric, f);
  const auto samples = sample_level_set(f, c, points, seed);
  PrincipalSpectrum out;
  out.level = c;
  out.points.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const MetricField m = metric.recentered(samples[i].point);
    SpectrumPoint& sp = out.points[i];
    sp.point = samples[i].point;
    sp.eigenvalues = shape_operator_eigenvalues(m, f, Vector::Zero(m.dim()));
    sp.clusters = cluster_eigenvalues(sp.eigenvalues, rel_gap);
  });
  if (out.points.empty()) return out;
  auto mults = [](const std::vector<Cluster>& cl) {
    std::vector<int> v;
    for (const Cluster& c2 : cl) v.push_back(c2.multiplicity);
    return v;
  };
  out.g = static_cast<int>(out.points.front().clusters.size());
  out.multiplicities = mults(out.points.front().clusters);
  for (const SpectrumPoint& sp : out.points) out.stable = out.stable && mults(sp.clusters) == out.multiplicities;
  return out;
}

/// Per point: 0 if (g, multiplicities) matches the first point of its level,
/// else 1. Cluster values and their spread across points go to details.
inline VerificationReport check_spectrum(const MetricField& metric, const SphereFunction& f,
                                         const std::vector<double>& levels, int points, std::uint64_t seed = 1,
                                         double tol = 1e-3) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep("spectrum", tol);
  Json per_level = Json::array();
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const PrincipalSpectrum s = principal_curvature_spectrum(metric, f, levels[li], points, derive_seed(seed, 1000 + li));
    std::vector<double> flags;
    for (const SpectrumPoint& sp : s.points) {
      std::vector<int> m;
      for (const Cluster& c : sp.clusters) m.push_back(c.multiplicity);
      const double mismatch = m == s.multiplicities ? 0.0 : 1.0;
      rep.add(mismatch);
      flags.push_back(mismatch);
    }
    rep.levels.push_back(VerificationReport::level_stats(levels[li], flags));
    Json values = Json::array(), spreads = Json::array();
    for (std::size_t ci = 0; ci < static_cast<std::size_t>(s.g); ++ci) {
      double lo = 0.0, hi = 0.0, sum = 0.0;
      std::size_t cnt = 0;
      for (const SpectrumPoint& sp : s.points) {
        if (sp.clusters.size() != static_cast<std::size_t>(s.g)) continue;
        const double v = sp.clusters[ci].value;
        lo = cnt == 0 ? v : std::min(lo, v);
        hi = cnt == 0 ? v : std::max(hi, v);
        sum += v;
        ++cnt;
      }
      values.push_back(cnt ? sum / cnt : 0.0);
      spreads.push_back(hi - lo);
    }
    per_level.push_back(Json{{"level", levels[li]},
                             {"g", s.g},
                             {"multiplicities", s.multiplicities},
                             {"stable", s.stable},
                             {"cluster_values", values},
                             {"cluster_spread", spreads}});
  }
  rep.details = Json{{"function", f.name()}, {"spectra", per_level}};
  rep.finish();
  rep.wall_time_ms = detail::elapsed_ms(start);
  return rep;
}

/// Ambient unit normals at a sphere point: n = grad^h f / |grad^h f|, and
/// the F-unit normals n1 of f and n2 of -f.
struct UnitNormals {
  Vector n, n1, n2;
};

inline UnitNormals unit_normals(const MetricField& metric, const SphereFunction& f, const Vector& p) {
  const MetricField m = metric.recentered(p);
  const Vector x = Vector::Zero(m.dim());
  UnitNormals u;
  const Vector gh = f.sphere_gradient(p);
  u.n = gh / gh.norm();
  u.n1 = m.chart().push_vector(x, unit_normal(m, f, x));
  u.n2 = m.chart().push_vector(x, unit_normal(m, f.negated(), x));
  return u;
}

/// Geodesics started along n1 stay integral curves of the unit normal
/// fields: of n1 until they cross a focal set, of n2 after it. At sampled
/// points of each geodesic (away from the focal sets) the deviation is the
/// larger of |c' - n_active| and the ODE residual |D_n n + 2 G(n)| of the
/// active field, in the chart centered on the point. Probes with
/// |grad^h f| < focal_band are skipped and counted.
inline VerificationReport check_geodesic_field(const MetricField& metric, const SphereFunction& f,
                                               const std::vector<double>& levels, int per_level, double T = 1.0,
                                               int steps = 400, std::uint64_t seed = 1, double tol = 1e-5,
                                               int probes = 20, double focal_band = 0.5) {
  const auto start = std::chrono::steady_clock::now();
  detail::require_sphere_metric(metric, f);
  VerificationReport rep("geodesic-field", tol);
  const SphereFunction g = f.negated();
  const double h = kChartStep;
  std::size_t skipped = 0;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto pts = sample_level_set(f, levels[li], per_level, derive_seed(seed, 1000 + li));
    std::vector<std::vector<double>> local(pts.size());
    std::vector<std::size_t> skip(pts.size(), 0);
    parallel_for(pts.size(), [&](std::size_t i) {
      const MetricField m0 = metric.recentered(pts[i].point);
      const Vector x0 = Vector::Zero(m0.dim());
      const GeodesicCurve curve = integrate_geodesic(m0, x0, unit_normal(m0, f, x0), T, steps);
      for (int q = 0; q <= probes; ++q) {
        const GeodesicPoint& gp = curve.points[static_cast<std::size_t>(q) * steps / probes];
        // the normal fields are singular on the focal sets; difference
        // quotients lose accuracy like 1/dist^3 as the curve passes them
        if (f.sphere_gradient(gp.point).norm() < focal_band) {
          ++skip[i];
          continue;
        }
        const MetricField m = metric.recentered(gp.point);
        const Vector x = Vector::Zero(m.dim());
        const Vector vel = m.chart().pull_vector(x, gp.velocity);
        const Vector a1 = unit_normal(m, f, x), a2 = unit_normal(m, g, x);
        const bool first = (vel - a1).norm() <= (vel - a2).norm();
        const SphereFunction& active = first ? f : g;
        const Vector nv = first ? a1 : a2;
        const Vector Dn = (unit_normal(m, active, x + h * nv) - unit_normal(m, active, x - h * nv)) / (2.0 * h);
        const double residual = (Dn + 2.0 * geodesic_spray(m, x, nv)).norm();
        local[i].push_back(std::max((vel - nv).norm(), residual));
      }
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      skipped += skip[i];
      for (double d : local[i]) rep.add(d);
    }
  }
  rep.details = Json{{"function", f.name()}, {"T", T}, {"steps", steps}, {"skipped_near_focal", skipped}};
  rep.finish();
  rep.wall_time_ms = detail::elapsed_ms(start);
  return rep;
}

}  // namespace finslab
