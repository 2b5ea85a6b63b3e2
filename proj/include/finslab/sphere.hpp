#pragma once

// The unit sphere S^n in R^{n+1}: gnomonic charts, Killing fields as skew
// matrices, and the metric fields (round, navigated Randers, localized)
// evaluated pointwise in chart coordinates.

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "finslab/errors.hpp"
#include "finslab/linalg.hpp"
#include "finslab/minkowski.hpp"
#include "finslab/navigation.hpp"

namespace finslab {

/// Gnomonic (central projection) chart x -> (c + E x) / sqrt(1 + |x|^2),
/// where E is an orthonormal frame of the complement of the center c.
/// A flat chart is the identity of R^n and has no sphere behind it.
class Chart {
 public:
  static constexpr double kDefaultRadius = 10.0;

  static Chart centered_at(const Vector& center, double radius = kDefaultRadius) {
    const double len = center.norm();
    if (center.size() < 2 || !(len > 0.0)) throw DimensionMismatch("chart center must be a nonzero vector in R^{n+1}");
    Chart c;
    c.center_ = center / len;
    c.radius_ = radius;
    const Eigen::Index N = center.size();
    Matrix H = Matrix::Identity(N, N);
    Vector diff = c.center_ - Vector::Unit(N, N - 1);
    if (diff.norm() > 1e-14) {
      const Vector u = diff / diff.norm();
      H -= 2.0 * u * u.transpose();
    }
    c.frame_ = H.leftCols(N - 1);
    return c;
  }

  static Chart flat(int n, double radius = kDefaultRadius) {
    Chart c;
    c.flat_ = true;
    c.radius_ = radius;
    c.frame_ = Matrix::Identity(n, n);
    c.center_ = Vector::Zero(n);
    return c;
  }

  int dim() const { return static_cast<int>(frame_.cols()); }
  int ambient_dim() const { return static_cast<int>(frame_.rows()); }
  bool is_flat() const { return flat_; }
  const Vector& center() const { return center_; }
  const Matrix& frame() const { return frame_; }
  double radius() const { return radius_; }
  bool contains(const Vector& x) const { return x.norm() < radius_; }

  Vector to_sphere(const Vector& x) const {
    require_chart_dim(x);
    if (flat_) return x;
    const Vector q = center_ + frame_ * x;
    return q / std::sqrt(1.0 + x.squaredNorm());
  }

  Vector to_chart(const Vector& p) const {
    if (flat_) return p;
    if (p.size() != ambient_dim()) throw DimensionMismatch("ambient point has wrong dimension");
    const double d = center_.dot(p);
    if (!(d > 1e-12)) throw ChartBoundary("point lies on or beyond the chart's horizon");
    Vector x = frame_.transpose() * p / d;
    if (!contains(x)) throw ChartBoundary("point maps outside the chart radius");
    return x;
  }

  /// Chart tangent vector at x -> ambient tangent vector at to_sphere(x).
  Vector push_vector(const Vector& x, const Vector& v) const {
    if (flat_) return v;
    const double s2 = 1.0 + x.squaredNorm();
    const double s = std::sqrt(s2);
    const Vector q = center_ + frame_ * x;
    return frame_ * v / s - q * (x.dot(v) / (s2 * s));
  }

  /// Matrix of push_vector at x, (n+1) x n.
  Matrix push_matrix(const Vector& x) const {
    if (flat_) return frame_;
    const double s2 = 1.0 + x.squaredNorm();
    const double s = std::sqrt(s2);
    const Vector q = center_ + frame_ * x;
    return frame_ / s - q * x.transpose() / (s2 * s);
  }

  /// Ambient tangent vector at to_sphere(x) -> chart vector; inverse of push_vector.
  Vector pull_vector(const Vector& x, const Vector& w) const {
    if (flat_) return w;
    const double s = std::sqrt(1.0 + x.squaredNorm());
    return s * (frame_.transpose() * w - x * center_.dot(w));
  }

  /// Pullback of the Euclidean metric: (I (1+|x|^2) - x x^T) / (1+|x|^2)^2.
  Matrix round_metric(const Vector& x) const {
    const int n = dim();
    if (flat_) return Matrix::Identity(n, n);
    const double s2 = 1.0 + x.squaredNorm();
    return (Matrix::Identity(n, n) * s2 - x * x.transpose()) / (s2 * s2);
  }

 private:
  void require_chart_dim(const Vector& x) const {
    if (x.size() != dim()) throw DimensionMismatch("chart point has wrong dimension");
  }

  bool flat_ = false;
  double radius_ = kDefaultRadius;
  Vector center_;
  Matrix frame_;
};

/// Skew matrix W in so(n+1); the vector field p -> W p is tangent to S^n.
class KillingField {
 public:
  KillingField() = default;
  explicit KillingField(Matrix W) : mat_(std::move(W)) {
    if (mat_.rows() != mat_.cols()) throw NotSkew("Killing matrix must be square");
    const double scale = 1.0 + mat_.cwiseAbs().maxCoeff();
    if ((mat_ + mat_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NotSkew("W + W^T != 0");
  }

  static KillingField zero(int ambient_dim) { return KillingField(Matrix::Zero(ambient_dim, ambient_dim)); }

  const Matrix& matrix() const { return mat_; }
  int ambient_dim() const { return static_cast<int>(mat_.rows()); }
  Vector at(const Vector& p) const { return mat_ * p; }
  KillingField scaled(double s) const { return KillingField(s * mat_); }

 private:
  Matrix mat_;
};

/// max |W p| over unit p: the largest c with +-ic an eigenvalue of W,
/// taken as sqrt of the top eigenvalue of the PSD matrix -W^2.
inline double killing_norm(const KillingField& W) {
  if (W.ambient_dim() == 0) return 0.0;
  const Matrix M = -(W.matrix() * W.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double killing_norm(const Matrix& W) { return killing_norm(KillingField(W)); }

/// J_{2k} = [[0, I_k], [-I_k, 0]].
inline Matrix standard_complex_structure(int k) {
  Matrix J = Matrix::Zero(2 * k, 2 * k);
  J.topRightCorner(k, k) = Matrix::Identity(k, k);
  J.bottomLeftCorner(k, k) = -Matrix::Identity(k, k);
  return J;
}

/// diag(0_{n0}, l_1 J_{2 n_1}, ..., l_k J_{2 n_k}) with 0 < l_1 < ... < l_k < 1.
/// ambient_dim, when given, must equal n0 + sum 2 n_i.
inline KillingField block_killing(int n0, const std::vector<double>& lambdas, const std::vector<int>& block_sizes,
                                  int ambient_dim = -1) {
  if (n0 < 0) throw DimensionMismatch("n0 must be >= 0");
  if (lambdas.size() != block_sizes.size()) throw DimensionMismatch("lambdas and block sizes differ in length");
  int N = n0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (block_sizes[i] <= 0) throw DimensionMismatch("block sizes must be positive");
    if (!(lambdas[i] > 0.0 && lambdas[i] < 1.0))
      throw LambdaOutOfRange("lambda " + std::to_string(lambdas[i]) + " is outside (0,1)");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw LambdaOutOfRange("lambdas must be strictly increasing");
    N += 2 * block_sizes[i];
  }
  if (ambient_dim >= 0 && N != ambient_dim)
    throw DimensionMismatch("blocks fill dimension " + std::to_string(N) + ", expected " + std::to_string(ambient_dim));
  if (N < 1) throw DimensionMismatch("empty Killing field");
  Matrix W = Matrix::Zero(N, N);
  int offset = n0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const int k = block_sizes[i];
    W.block(offset, offset, 2 * k, 2 * k) = lambdas[i] * standard_complex_structure(k);
    offset += 2 * k;
  }
  return KillingField(std::move(W));
}

/// Ambient tangent vector field on the sphere (or on R^n for flat charts).
using AmbientField = std::function<Vector(const Vector&)>;

/// Chart-local Finsler metric x -> pointwise Minkowski norm.
class MetricField {
 public:
  enum class Kind { flat, round, randers, localization };

  static MetricField flat(int n, double radius = Chart::kDefaultRadius) {
    MetricField m;
    m.kind_ = Kind::flat;
    m.chart_ = Chart::flat(n, radius);
    return m;
  }

  static MetricField round(Chart chart) {
    if (chart.is_flat()) throw DimensionMismatch("round metric needs a sphere chart");
    MetricField m;
    m.kind_ = Kind::round;
    m.chart_ = std::move(chart);
    return m;
  }

  static MetricField randers(Chart chart, KillingField W) {
    if (chart.is_flat()) throw DimensionMismatch("randers sphere needs a sphere chart");
    if (W.ambient_dim() != chart.ambient_dim()) throw DimensionMismatch("Killing field and chart dimensions differ");
    const double len = killing_norm(W);
    if (!(len < 1.0)) throw WindTooStrong("killing_norm(W) = " + std::to_string(len) + " must be < 1");
    MetricField m;
    m.kind_ = Kind::randers;
    m.chart_ = std::move(chart);
    m.wind_ = std::move(W);
    return m;
  }

  /// Riemannian metric x -> g^F_{Y(x)} for a nowhere-zero field Y.
  static MetricField localization(const MetricField& base, AmbientField Y) {
    MetricField m;
    m.kind_ = Kind::localization;
    m.chart_ = base.chart_;
    m.base_ = std::make_shared<const MetricField>(base);
    m.field_ = std::move(Y);
    return m;
  }

  Kind kind() const { return kind_; }
  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const KillingField& wind() const { return wind_; }
  bool is_riemannian() const { return kind_ != Kind::randers; }

  MetricField recentered(const Vector& center) const {
    MetricField m = *this;
    if (kind_ == Kind::flat) return m;
    m.chart_ = Chart::centered_at(center, chart_.radius());
    if (base_) m.base_ = std::make_shared<const MetricField>(base_->recentered(center));
    return m;
  }

  /// Chart coordinates of the navigation wind at x (zero unless randers).
  Vector wind_at(const Vector& x) const {
    if (kind_ != Kind::randers) return Vector::Zero(dim());
    return chart_.pull_vector(x, wind_.at(chart_.to_sphere(x)));
  }

  NormEvaluator norm_at(const Vector& x) const {
    if (x.size() != dim()) throw DimensionMismatch("chart point has wrong dimension");
    if (!chart_.contains(x)) throw ChartBoundary("|x| = " + std::to_string(x.norm()) + " outside chart radius");
    switch (kind_) {
      case Kind::flat:
        return NormEvaluator::euclidean(dim());
      case Kind::round:
        return NormEvaluator::quadratic(chart_.round_metric(x));
      case Kind::randers: {
        const Matrix h = chart_.round_metric(x);
        const Vector w = wind_at(x);
        if (w.squaredNorm() == 0.0) return NormEvaluator::quadratic(h);
        return detail::randers_from_riemannian(h, w);
      }
      case Kind::localization: {
        const Vector Y = chart_.pull_vector(x, field_(chart_.to_sphere(x)));
        return NormEvaluator::quadratic(fundamental_tensor(base_->norm_at(x), Y).G);
      }
    }
    throw Error("unreachable metric kind");
  }

 private:
  Kind kind_ = Kind::flat;
  Chart chart_;
  KillingField wind_;
  std::shared_ptr<const MetricField> base_;
  AmbientField field_;
};

inline MetricField round_metric(const Chart& chart) { return MetricField::round(chart); }

inline MetricField randers_sphere(const Chart& chart, const KillingField& W) { return MetricField::randers(chart, W); }

/// Point-to-chart helper: metric recentered so that p sits at x = 0.
inline MetricField centered_on(const MetricField& m, const Vector& p) { return m.recentered(p); }

/// Rotation generators used throughout: lambda J_{n+1} for odd n, otherwise
/// diag(0, lambda J_n).
inline KillingField standard_wind(int n, double lambda) {
  const int N = n + 1;
  if (N % 2 == 0) return block_killing(0, {lambda}, {N / 2});
  return block_killing(1, {lambda}, {(N - 1) / 2});
}

}  // namespace finslab
