#pragma once

// Minkowski norms on R^n: quadratic forms and Randers norms F = alpha + beta,
// their fundamental tensors g_ij(y) = 1/2 d^2 F^2 / dy^i dy^j, and the
// Legendre map that turns a covector into the vector it is dual to.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "finslab/dual.hpp"
#include "finslab/errors.hpp"
#include "finslab/linalg.hpp"

namespace finslab {

enum class NormKind { quadratic, randers };

inline const char* to_string(NormKind k) { return k == NormKind::quadratic ? "quadratic" : "randers"; }

class NormEvaluator {
 public:
  NormEvaluator() = default;

  static NormEvaluator quadratic(Matrix A) {
    check_spd(A, "quadratic form");
    NormEvaluator N;
    N.kind_ = NormKind::quadratic;
    N.beta_ = Vector::Zero(A.rows());
    N.alpha_ = std::move(A);
    return N;
  }

  static NormEvaluator euclidean(int n) { return quadratic(Matrix::Identity(n, n)); }

  static NormEvaluator randers(Matrix alpha, Vector beta) {
    check_spd(alpha, "randers alpha");
    if (beta.size() != alpha.rows())
      throw DimensionMismatch("randers beta has length " + std::to_string(beta.size()) + ", alpha is " +
                              std::to_string(alpha.rows()) + "x" + std::to_string(alpha.cols()));
    NormEvaluator N;
    N.kind_ = NormKind::randers;
    N.alpha_ = std::move(alpha);
    N.beta_ = std::move(beta);
    const double b = N.beta_alpha_norm();
    if (!(b < 1.0)) throw NotPositiveDefinite("randers norm needs |beta|_alpha < 1, got " + std::to_string(b));
    return N;
  }

  int dim() const { return static_cast<int>(alpha_.rows()); }
  NormKind kind() const { return kind_; }
  const Matrix& alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }
  bool is_quadratic() const { return kind_ == NormKind::quadratic; }

  /// |beta|_alpha = sqrt(beta^T alpha^{-1} beta).
  double beta_alpha_norm() const { return std::sqrt(beta_.dot(alpha_.llt().solve(beta_))); }

  template <class S>
  S evaluate(std::span<const S> y) const {
    using std::sqrt;
    const int n = dim();
    S q = 0.0;
    for (int i = 0; i < n; ++i) {
      S row = 0.0;
      for (int j = 0; j < n; ++j) row += alpha_(i, j) * y[j];
      q += y[i] * row;
    }
    S F = sqrt(q);
    if (kind_ == NormKind::randers)
      for (int i = 0; i < n; ++i) F += beta_(i) * y[i];
    return F;
  }

  double operator()(const Vector& y) const {
    require_dim(y);
    if (y.squaredNorm() == 0.0) return 0.0;
    return std::sqrt(y.dot(alpha_ * y)) + (kind_ == NormKind::randers ? beta_.dot(y) : 0.0);
  }

  void require_dim(const Vector& y) const {
    if (y.size() != dim())
      throw DimensionMismatch("vector of length " + std::to_string(y.size()) + " for a norm on R^" +
                              std::to_string(dim()));
  }

 private:
  static void check_spd(const Matrix& A, const char* what) {
    if (A.rows() == 0 || A.rows() != A.cols()) throw DimensionMismatch(std::string(what) + " must be square and non-empty");
    if (!is_symmetric(A, 1e-12 * (1.0 + A.cwiseAbs().maxCoeff())))
      throw NotPositiveDefinite(std::string(what) + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw NotPositiveDefinite(std::string(what) + " is not positive definite");
  }

  NormKind kind_ = NormKind::quadratic;
  Matrix alpha_;
  Vector beta_;
};

/// The inner product g^F_y frozen at a base vector y.
struct InnerProductAtY {
  Vector y;
  Matrix G;

  double operator()(const Vector& u, const Vector& v) const { return u.dot(G * v); }
};

enum class DerivativeMode { dual, finite_difference };

/// Gradient of F^2/2 in y, exact via one dual sweep per coordinate.
template <class S>
std::vector<S> half_f2_gradient(const NormEvaluator& N, std::span<const S> y) {
  using D = Dual<S>;
  const int n = N.dim();
  std::vector<D> yd(static_cast<std::size_t>(n));
  std::vector<S> grad(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) yd[i] = D(y[i], S(0.0));
  for (int i = 0; i < n; ++i) {
    yd[i].d = S(1.0);
    D F = N.evaluate<D>(yd);
    grad[i] = F.v * F.d;
    yd[i].d = S(0.0);
  }
  return grad;
}

/// Hessian of F^2/2 in y (the fundamental tensor) over scalar S.
template <class S>
SquareOf<S> half_f2_hessian(const NormEvaluator& N, std::span<const S> y) {
  using D1 = Dual<S>;
  using D2 = Dual<D1>;
  const int n = N.dim();
  SquareOf<S> H(n);
  std::vector<D2> yd(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) yd[a] = D2(D1(y[a], S(0.0)), D1(S(0.0), S(0.0)));
  for (int i = 0; i < n; ++i) {
    yd[i].v.d = S(1.0);
    for (int j = i; j < n; ++j) {
      yd[j].d.v = S(1.0);
      D2 F = N.evaluate<D2>(yd);
      // d_i d_j (F^2/2) = F_i F_j + F F_ij
      S hij = F.v.d * F.d.v + F.v.v * F.d.d;
      H(i, j) = hij;
      H(j, i) = hij;
      yd[j].d.v = S(0.0);
    }
    yd[i].v.d = S(0.0);
  }
  return H;
}

/// Central-difference Hessian of F^2/2 at step h = 1e-5 (1 + |y|).
inline Matrix half_f2_hessian_fd(const NormEvaluator& N, const Vector& y) {
  const int n = N.dim();
  const double h = 1e-5 * (1.0 + y.norm());
  auto f2 = [&](const Vector& z) { double F = N(z); return 0.5 * F * F; };
  Matrix H(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Vector e_i = Vector::Unit(n, i) * h, e_j = Vector::Unit(n, j) * h;
      double v = (f2(y + e_i + e_j) - f2(y + e_i - e_j) - f2(y - e_i + e_j) + f2(y - e_i - e_j)) / (4.0 * h * h);
      H(i, j) = H(j, i) = v;
    }
  }
  return H;
}

inline InnerProductAtY fundamental_tensor(const NormEvaluator& N, const Vector& y,
                                          DerivativeMode mode = DerivativeMode::dual) {
  N.require_dim(y);
  if (y.squaredNorm() == 0.0) throw ZeroBaseVector("fundamental tensor needs y != 0");
  Matrix G;
  if (N.is_quadratic()) {
    G = N.alpha();
  } else if (mode == DerivativeMode::dual) {
    std::vector<double> ys = to_std(y);
    G = values_of(half_f2_hessian<double>(N, std::span<const double>(ys)));
  } else {
    G = half_f2_hessian_fd(N, y);
  }
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("fundamental tensor is not positive definite");
  return {y, G};
}

inline double inner_product(const NormEvaluator& N, const Vector& y, const Vector& u, const Vector& v) {
  return fundamental_tensor(N, y)(u, v);
}

/// Finds y with g_ij(y) y^j = xi_i, i.e. grad(F^2/2)(y) = xi.
///
/// Damped Newton on the strictly convex potential F^2/2 - xi.y, whose
/// gradient is the residual and whose Hessian is g(y); Armijo backtracking
/// with factor 1/2 keeps every step descending.
inline Vector legendre_solve(const NormEvaluator& N, const Vector& xi) {
  N.require_dim(xi);
  const double scale = xi.norm();
  if (scale == 0.0) throw ZeroBaseVector("legendre_solve needs xi != 0");
  if (N.is_quadratic()) return N.alpha().ldlt().solve(xi);

  auto potential = [&](const Vector& y) { double F = N(y); return 0.5 * F * F - xi.dot(y); };
  auto residual = [&](const Vector& y) {
    std::vector<double> ys = to_std(y);
    return Vector(to_eigen(half_f2_gradient<double>(N, std::span<const double>(ys))) - xi);
  };

  Vector y = N.alpha().ldlt().solve(xi);
  Vector r = residual(y);
  double best = r.norm();
  for (int iter = 0; iter < 100 && best > 1e-15 * scale; ++iter) {
    Matrix G = fundamental_tensor(N, y).G;
    Vector step = G.ldlt().solve(r);
    Vector trial = y - step;
    Vector r_trial = residual(trial);
    if (!(r_trial.norm() < best)) {
      const double phi0 = potential(y);
      const double slope = -r.dot(step);
      double t = 1.0;
      while (t > 1e-12 && !(potential(trial) <= phi0 + 1e-4 * t * slope)) {
        t *= 0.5;
        trial = y - t * step;
      }
      if (t <= 1e-12) break;  // no descent left at this precision
      r_trial = residual(trial);
    }
    y = trial;
    r = r_trial;
    best = r.norm();
  }
  if (!(best < 1e-9 * scale)) throw NoConvergence("legendre_solve residual " + std::to_string(best / scale));
  return y;
}

/// Dual norm F*(xi) = max xi(v)/F(v); equals F(legendre_solve(xi)).
inline double dual_norm(const NormEvaluator& N, const Vector& xi) { return N(legendre_solve(N, xi)); }

}  // namespace finslab
