#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "finslab/minkowski.hpp"
#include "finslab/random.hpp"

using namespace finslab;
using Catch::Approx;

namespace {

NormEvaluator randers_2d() {
  Vector beta(2);
  beta << 0.5, 0.0;
  return NormEvaluator::randers(Matrix::Identity(2, 2), beta);
}

// alpha = A A^T + I, beta scaled to |beta|_alpha = 0.6
NormEvaluator random_randers(Rng& rng, int n) {
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = 0.4 * rng.normal();
  Matrix alpha = A * A.transpose() + Matrix::Identity(n, n);
  Vector b = rng.normal_vector(n);
  b *= 0.6 / std::sqrt(b.dot(alpha.llt().solve(b)));
  return NormEvaluator::randers(alpha, b);
}

}  // namespace

TEST_CASE("euclidean tensor is the identity") {
  const auto N = NormEvaluator::euclidean(2);
  const auto g = fundamental_tensor(N, Vector::Unit(2, 0));
  REQUIRE((g.G - Matrix::Identity(2, 2)).norm() == 0.0);
  Vector u(2), v(2);
  u << 0.3, -1.2;
  v << 2.0, 0.7;
  REQUIRE(inner_product(N, Vector::Unit(2, 1), u, v) == Approx(u.dot(v)));
}

TEST_CASE("randers tensor against central differences") {
  const auto N = randers_2d();
  const Vector y = Vector::Unit(2, 1);
  const Matrix G = fundamental_tensor(N, y).G;
  const Matrix H = half_f2_hessian_fd(N, y);
  CHECK((G - H).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(inner_product(N, y, Vector::Unit(2, 0), Vector::Unit(2, 0)) == Approx(H(0, 0)).margin(1e-6));
  // hand value: F = |y| + y1/2, g_11 at (0,1) = beta_1^2 + F * 1 = 1.25
  CHECK(G(0, 0) == Approx(1.25).margin(1e-12));
}

TEST_CASE("tensor is zero-homogeneous and satisfies Euler") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 4;
    const auto N = random_randers(rng, n);
    const Vector y = rng.normal_vector(n);
    const auto g1 = fundamental_tensor(N, y);
    const auto g2 = fundamental_tensor(N, Vector(2.0 * y));
    CHECK((g1.G - g2.G).cwiseAbs().maxCoeff() < 1e-10);
    const double F = N(y);
    CHECK(std::abs(g1(y, y) - F * F) < 1e-9 * F * F);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g1.G);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    for (double lam : {0.5, 2.0, 7.0}) CHECK(std::abs(N(Vector(lam * y)) - lam * F) < 1e-12 * lam * F);
  }
}

TEST_CASE("dual and finite-difference modes agree") {
  Rng rng(5);
  const auto N = random_randers(rng, 3);
  const Vector y = rng.normal_vector(3);
  const Matrix a = fundamental_tensor(N, y, DerivativeMode::dual).G;
  const Matrix b = fundamental_tensor(N, y, DerivativeMode::finite_difference).G;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("legendre map") {
  const auto E = NormEvaluator::euclidean(3);
  Vector xi(3);
  xi << 0.2, -1.0, 3.0;
  CHECK((legendre_solve(E, xi) - xi).norm() < 1e-14);

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto N = random_randers(rng, 4);
    const Vector y = rng.normal_vector(4);
    const Vector cov = fundamental_tensor(N, y).G * y;
    CHECK((legendre_solve(N, cov) - y).norm() < 1e-8 * y.norm());
    const Vector z = rng.normal_vector(4);
    CHECK((legendre_solve(N, Vector(2.0 * z)) - 2.0 * legendre_solve(N, z)).norm() < 1e-9 * z.norm());
  }
}

TEST_CASE("legendre map against a direction scan") {
  // maximize xi(v)/F(v) over the unit circle; the maximizer scaled to
  // F = F*(xi) is the Legendre dual of xi
  const auto N = randers_2d();
  const Vector xi = Vector::Unit(2, 0);
  const int count = 1'000'000;
  double best = -1.0, best_t = 0.0;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    Vector v(2);
    v << std::cos(t), std::sin(t);
    const double r = xi.dot(v) / N(v);
    if (r > best) {
      best = r;
      best_t = t;
    }
  }
  Vector v(2);
  v << std::cos(best_t), std::sin(best_t);
  const Vector scanned = v * (best / N(v));
  const Vector y = legendre_solve(N, xi);
  CHECK((y - scanned).norm() < 1e-4);
  CHECK(dual_norm(N, xi) == Approx(best).margin(1e-9));
}

TEST_CASE("construction errors") {
  Vector beta(2);
  beta << 1.2, 0.0;
  CHECK_THROWS_AS(NormEvaluator::randers(Matrix::Identity(2, 2), beta), NotPositiveDefinite);
  Matrix bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(NormEvaluator::quadratic(bad), NotPositiveDefinite);
  CHECK_THROWS_AS(NormEvaluator::randers(Matrix::Identity(3, 3), Vector::Zero(2)), DimensionMismatch);
  CHECK_THROWS_AS(fundamental_tensor(randers_2d(), Vector::Zero(2)), ZeroBaseVector);
  CHECK_THROWS_AS(legendre_solve(randers_2d(), Vector::Zero(2)), ZeroBaseVector);
  CHECK_THROWS_AS(randers_2d()(Vector::Zero(3)), DimensionMismatch);
}
