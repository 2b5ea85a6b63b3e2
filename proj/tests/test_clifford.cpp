#include <catch_amalgamated.hpp>

#include <cmath>

#include "finslab/clifford.hpp"
#include "finslab/io.hpp"

using namespace finslab;
using Catch::Approx;

namespace {

// dimension of so(k), u(k), sp(k) by hand, per m mod 8
int expected_centralizer(int m, int k1, int k2) {
  auto so = [](int k) { return k * (k - 1) / 2; };
  auto sp = [](int k) { return k * (2 * k + 1); };
  switch (m % 8) {
    case 1: case 7: return so(k1);
    case 2: case 6: return k1 * k1;
    case 3: case 5: return sp(k1);
    case 0: return so(k1) + so(k2);
    default: return sp(k1) + sp(k2);
  }
}

bool is_integer_matrix(const Matrix& M) {
  return (M.array() - M.array().round()).abs().maxCoeff() == 0.0;
}

}  // namespace

TEST_CASE("delta table") {
  CHECK(clifford_delta(1) == 1);
  CHECK(clifford_delta(2) == 2);
  CHECK(clifford_delta(3) == 4);
  CHECK(clifford_delta(4) == 4);
  CHECK(clifford_delta(5) == 8);
  CHECK(clifford_delta(8) == 8);
  CHECK(clifford_delta(9) == 16);
  CHECK(clifford_delta(17) == 256);
}

TEST_CASE("smallest system") {
  const CliffordSystem s = build_clifford(1, 1);
  REQUIRE(s.P.size() == 2);
  Matrix P0(2, 2), P1(2, 2);
  P0 << 1, 0, 0, -1;
  P1 << 0, 1, 1, 0;
  CHECK(s.P[0] == P0);
  CHECK(s.P[1] == P1);
  CHECK(s.l == 1);
  CHECK(build_clifford(3, 1).dim() == 8);
  CHECK(build_clifford(9, 1).delta == 16);
}

TEST_CASE("anticommutation is exact over the grid") {
  for (int m = 1; m <= 9; ++m)
    for (int k = 1; k <= 4; ++k) {
      if (clifford_delta(m) * k > 32) continue;
      const CliffordSystem s = build_clifford(m, k);
      CHECK(s.l == k * clifford_delta(m));
      CHECK(anticommutation_residual(s) == 0.0);
      for (const Matrix& P : s.P) {
        CHECK(is_integer_matrix(P));
        CHECK(P == P.transpose());
      }
    }
}

TEST_CASE("clifford sphere elements are reflections") {
  const CliffordSystem s = build_clifford(3, 2);
  Rng rng(1);
  const int N = s.dim();
  for (int t = 0; t < 100; ++t) {
    const Vector a = rng.unit_vector(s.m + 1);
    Matrix P = Matrix::Zero(N, N);
    for (int i = 0; i <= s.m; ++i) P += a(i) * s.P[static_cast<std::size_t>(i)];
    CHECK(std::abs(P.trace()) < 1e-12);
    CHECK((P * P - Matrix::Identity(N, N)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("otfkm values") {
  const CliffordSystem t = build_clifford(1, 3);
  // E+(P0) is the first half of the coordinates
  CHECK(otfkm_value(t, Vector::Unit(6, 0)) == Approx(-1.0).margin(1e-15));
  // <P0 x, x> = 0 and <P1 x, x> = 2 x0 x4 = 0
  const Vector x = (Vector::Unit(6, 0) + Vector::Unit(6, 4)) / std::sqrt(2.0);
  CHECK(otfkm_value(t, x) == Approx(1.0).margin(1e-15));

  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    const double f = otfkm_value(t, rng.unit_vector(6));
    CHECK(f >= -1.0 - 1e-12);
    CHECK(f <= 1.0 + 1e-12);
  }
  // tangential gradient against a difference quotient of f(x / |x|)
  const Vector p = rng.unit_vector(6);
  Vector g = otfkm_gradient(t, p);
  g -= g.dot(p) * p;
  for (int i = 0; i < 6; ++i) {
    const Vector e = 1e-6 * Vector::Unit(6, i);
    CHECK(g(i) == Approx((otfkm_value(t, p + e) - otfkm_value(t, p - e)) / 2e-6).margin(1e-6));
  }
}

TEST_CASE("centralizer dimensions") {
  CHECK(centralizer(build_clifford(1, 3)).dimension() == 3);
  CHECK(centralizer(build_clifford(2, 1)).dimension() == 1);
  CHECK(centralizer(build_clifford(4, 1, 1)).dimension() == 6);
  CHECK(centralizer_type(build_clifford(1, 3)) == std::string("so(k)"));

  // reduced solver against the dense one over all of so(2l)
  for (auto [m, k] : {std::pair{1, 3}, {2, 1}, {2, 2}, {3, 1}, {5, 1}}) {
    const CliffordSystem s = build_clifford(m, k);
    CHECK(centralizer(s).dimension() == centralizer_dense(s).dimension());
  }
  const CliffordSystem split = build_clifford(4, 1, 1);
  CHECK(centralizer_dense(split).dimension() == 6);

  for (const Matrix& X : centralizer(build_clifford(3, 2)).elements) {
    CHECK((X + X.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (const Matrix& P : build_clifford(3, 2).P) CHECK((X * P - P * X).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("audit grid") {
  for (int m = 1; m <= 9; ++m) {
    const int d = clifford_delta(m);
    for (int k = 1; 2 * k * d <= 64; ++k) {
      const CliffordSystem s = build_clifford(m, k);
      const CliffordAudit a = audit_clifford(s);
      INFO("m=" << m << " k=" << k);
      CHECK(a.anticommutation == 0.0);
      CHECK(a.multiplicities_ok);
      CHECK(a.centralizer_dim == expected_centralizer(m, k, 0));
      CHECK(a.predicted_dim == a.centralizer_dim);
      CHECK(a.spin_dim == m * (m + 1) / 2);
      CHECK(a.closure_residual < 1e-10);
    }
    if (m % 4 != 0) continue;
    for (int k1 = 1; 2 * (k1 + 1) * d <= 64; ++k1)
      for (int k2 = 1; k2 <= k1 && 2 * (k1 + k2) * d <= 64; ++k2) {
        const CliffordSystem s = build_clifford(m, k1, k2);
        const CliffordAudit a = audit_clifford(s);
        INFO("m=" << m << " k1=" << k1 << " k2=" << k2);
        CHECK(a.centralizer_dim == expected_centralizer(m, k1, k2));
        CHECK(a.closure_residual < 1e-10);
      }
  }
}

TEST_CASE("split systems") {
  const CliffordSystem s = build_clifford(4, 1, 2);
  CHECK(s.k1 == 2);
  CHECK(s.k2 == 1);
  CHECK_THROWS_AS(build_clifford(3, 1, 1), UnsupportedSplit);
  // the two irreducible modules differ in the sign of trace(P0...Pm)
  CliffordSystem copy = s;
  validate_clifford(copy);
  CHECK(copy.k1 == 2);
  CHECK(copy.k2 == 1);
}

TEST_CASE("spin lift") {
  const CliffordSystem s1 = build_clifford(1, 2);
  const SkewBasis b1 = spin_lift(s1);
  REQUIRE(b1.dimension() == 1);
  CHECK((b1.elements[0] + b1.elements[0].transpose()).norm() == 0.0);

  const CliffordSystem s2 = build_clifford(2, 1);
  const SkewBasis b2 = spin_lift(s2);
  CHECK(b2.dimension() == 3);
  CHECK(lie_closure_residual(b2.elements) < 1e-12);

  // flow of t P_i P_j preserves f; exp computed from the eigen-decomposition
  Rng rng(3);
  const CliffordSystem s = build_clifford(1, 3);
  for (double t : {0.1, 0.7}) {
    const Matrix A = t * s.P[0] * s.P[1];
    Eigen::ComplexEigenSolver<Matrix> es(A);
    const Eigen::MatrixXcd E = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                               es.eigenvectors().inverse();
    const Matrix flow = E.real();
    for (int i = 0; i < 20; ++i) {
      const Vector x = rng.unit_vector(6);
      CHECK(std::abs(otfkm_value(s, flow * x) - otfkm_value(s, x)) < 1e-8);
    }
  }
}

TEST_CASE("clifford point") {
  const CliffordSystem s = build_clifford(1, 3);
  const CliffordPoint p0 = find_clifford_point(s, Vector::Unit(6, 1));
  CHECK(p0.coefficients[0] == Approx(1.0));
  CHECK(std::abs(p0.coefficients[1]) < 1e-15);

  // y in E+(3/5 P0 + 4/5 P1)
  const Matrix P = 0.6 * s.P[0] + 0.8 * s.P[1];
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  const Vector y = es.eigenvectors().col(5);
  REQUIRE(es.eigenvalues()(5) == Approx(1.0));
  const CliffordPoint cp = find_clifford_point(s, y);
  CHECK(cp.coefficients[0] == Approx(0.6).margin(1e-10));
  CHECK(cp.coefficients[1] == Approx(0.8).margin(1e-10));
  CHECK((cp.P - P).norm() < 1e-10);

  Rng rng(4);
  CHECK_THROWS_AS(find_clifford_point(s, rng.unit_vector(6)), NotOnFocalSet);
}

TEST_CASE("symmetry dimension") {
  CHECK(full_symmetry_dimension(build_clifford(1, 3)) == 4);
  CHECK(full_symmetry_dimension(build_clifford(2, 1)) == 4);
  CHECK(full_symmetry_dimension(build_clifford(4, 1, 1)) == 16);
}

TEST_CASE("json round trip") {
  const CliffordSystem s = build_clifford(4, 2, 1);
  const CliffordSystem back = clifford_from_json(parse_json(to_json(s).dump()));
  CHECK(back.m == 4);
  CHECK(back.k1 == 2);
  CHECK(back.k2 == 1);
  for (std::size_t i = 0; i < s.P.size(); ++i) CHECK(back.P[i] == s.P[i]);

  Json broken = to_json(build_clifford(1, 1));
  broken["matrices"][1] = Json::array({Json::array({1, 0}), Json::array({0, -1})});
  CHECK_THROWS_AS(clifford_from_json(broken), DimensionMismatch);
}
