#pragma once

// Symmetric Clifford systems P_0..P_m on R^{2l}, the OT-FKM polynomial, the
// centralizer algebra c(Sigma) and the spin lift so(m+1) inside so(2l).

#include <array>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "finslab/errors.hpp"
#include "finslab/linalg.hpp"
#include "finslab/random.hpp"
#include "finslab/report.hpp"

namespace finslab {

/// Dimension of the irreducible representation: 1, 2, 4, 4, 8, 8, 8, 8 for
/// m = 1..8, then multiplied by 16 every 8 steps.
inline int clifford_delta(int m) {
  if (m < 1) throw DimensionMismatch("clifford systems need m >= 1");
  static constexpr std::array<int, 8> base{1, 2, 4, 4, 8, 8, 8, 8};
  int scale = 1;
  while (m > 8) {
    m -= 8;
    scale *= 16;
  }
  return scale * base[static_cast<std::size_t>(m - 1)];
}

struct CliffordSystem {
  int m = 0;
  int l = 0;
  int k = 0;              // total multiplicity k1 + k2
  int k1 = 0, k2 = 0;     // only meaningful when m = 0 mod 4
  int delta = 0;
  std::vector<Matrix> P;  // m + 1 symmetric 2l x 2l matrices

  bool is_split() const { return m % 4 == 0; }
  int dim() const { return 2 * l; }
  /// Multiplicities of the OT-FKM hypersurfaces: (m, l - m - 1).
  int m1() const { return m; }
  int m2() const { return l - m - 1; }
};

namespace detail {

/// Left multiplication by the imaginary units e_1..e_7 on the octonions R^8,
/// from the Fano triples e_a e_b = e_c. Restricting to (1,2,3) on R^4 gives
/// the quaternions.
inline std::vector<Matrix> octonion_units(int count, int dim) {
  static constexpr int triples[7][3] = {{1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 6, 5}};
  int table[8][8] = {};  // table[a][b] = signed index of e_a e_b, entry s*(c+1)
  for (const auto& t : triples) {
    const int a = t[0], b = t[1], c = t[2];
    const int cyc[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
    for (const auto& q : cyc) {
      table[q[0]][q[1]] = q[2] + 1;
      table[q[1]][q[0]] = -(q[2] + 1);
    }
  }
  std::vector<Matrix> L;
  for (int i = 1; i <= count; ++i) {
    Matrix M = Matrix::Zero(dim, dim);
    M(i, 0) = 1.0;   // e_i e_0 = e_i
    M(0, i) = -1.0;  // e_i e_i = -e_0
    for (int j = 1; j < dim; ++j) {
      if (j == i) continue;
      const int s = table[i][j];
      if (s == 0 || std::abs(s) - 1 >= dim) throw Error("octonion table is not closed in dimension " + std::to_string(dim));
      M(std::abs(s) - 1, j) = s > 0 ? 1.0 : -1.0;
    }
    L.push_back(std::move(M));
  }
  return L;
}

/// p anticommuting complex structures (skew, E^2 = -I) on R^d of minimal d.
inline std::vector<Matrix> complex_structures(int p) {
  if (p == 0) return {};
  if (p == 1) {
    Matrix J(2, 2);
    J << 0, 1, -1, 0;
    return {J};
  }
  if (p <= 3) return octonion_units(p, 4);
  if (p <= 7) return octonion_units(p, 8);
  // eight structures F_1..F_8 on R^16 and their product Omega
  Matrix Z(2, 2), J2(2, 2);
  Z << 1, 0, 0, -1;
  J2 << 0, 1, -1, 0;
  std::vector<Matrix> F;
  for (const Matrix& O : octonion_units(7, 8)) F.push_back(kron(O, Z));
  F.push_back(kron(Matrix::Identity(8, 8), J2));
  Matrix Omega = Matrix::Identity(16, 16);
  for (const Matrix& f : F) Omega = Omega * f;
  const std::vector<Matrix> inner = complex_structures(p - 8);
  const int d = inner.empty() ? 1 : static_cast<int>(inner.front().rows());
  std::vector<Matrix> out;
  for (const Matrix& E : inner) out.push_back(kron(E, Omega));
  for (const Matrix& f : F) out.push_back(kron(Matrix::Identity(d, d), f));
  return out;
}

/// Irreducible system: P_0 = diag(I, -I), P_1 = [[0, I], [I, 0]],
/// P_{1+i} = [[0, E_i], [-E_i, 0]].
inline std::vector<Matrix> irreducible_system(int m) {
  const std::vector<Matrix> E = complex_structures(m - 1);
  const int l = clifford_delta(m);
  std::vector<Matrix> P;
  Matrix P0 = Matrix::Zero(2 * l, 2 * l);
  P0.topLeftCorner(l, l).setIdentity();
  P0.bottomRightCorner(l, l) = -Matrix::Identity(l, l);
  P.push_back(P0);
  Matrix P1 = Matrix::Zero(2 * l, 2 * l);
  P1.topRightCorner(l, l).setIdentity();
  P1.bottomLeftCorner(l, l).setIdentity();
  P.push_back(P1);
  for (const Matrix& Ei : E) {
    if (Ei.rows() != l) throw Error("complex structure has the wrong size");
    Matrix Pi = Matrix::Zero(2 * l, 2 * l);
    Pi.topRightCorner(l, l) = Ei;
    Pi.bottomLeftCorner(l, l) = -Ei;
    P.push_back(Pi);
  }
  return P;
}

/// Each P'_i tensored with I_k, in the coordinate order that keeps
/// P_0 = diag(I_l, -I_l).
inline Matrix inflate(const Matrix& Pp, int k) {
  const int d = static_cast<int>(Pp.rows()) / 2;
  Matrix out(2 * d * k, 2 * d * k);
  const Matrix I = Matrix::Identity(k, k);
  for (int bi = 0; bi < 2; ++bi)
    for (int bj = 0; bj < 2; ++bj)
      out.block(bi * d * k, bj * d * k, d * k, d * k) = kron(Pp.block(bi * d, bj * d, d, d), I);
  return out;
}

}  // namespace detail

/// k copies of the irreducible representation.
inline CliffordSystem build_clifford(int m, int k) {
  if (m < 1) throw DimensionMismatch("clifford systems need m >= 1");
  if (k < 1) throw DimensionMismatch("clifford systems need k >= 1");
  CliffordSystem sys;
  sys.m = m;
  sys.delta = clifford_delta(m);
  sys.k = k;
  if (m % 4 == 0) sys.k1 = k;
  sys.l = k * sys.delta;
  for (const Matrix& Pp : detail::irreducible_system(m)) sys.P.push_back(detail::inflate(Pp, k));
  return sys;
}

/// m = 0 mod 4: k1 copies of one irreducible and k2 of the other, which
/// differs by the sign of P_m. Normalized to k1 >= k2.
inline CliffordSystem build_clifford(int m, int k1, int k2) {
  if (m % 4 != 0) throw UnsupportedSplit("(k1, k2) needs m = 0 mod 4, got m = " + std::to_string(m));
  if (k1 < 0 || k2 < 0 || k1 + k2 < 1) throw DimensionMismatch("need k1, k2 >= 0 and k1 + k2 >= 1");
  if (k1 < k2) std::swap(k1, k2);
  if (k2 == 0) return build_clifford(m, k1);
  const CliffordSystem a = build_clifford(m, k1);
  std::vector<Matrix> flipped = detail::irreducible_system(m);
  flipped[static_cast<std::size_t>(m)] *= -1.0;
  CliffordSystem sys;
  sys.m = m;
  sys.delta = a.delta;
  sys.k1 = k1;
  sys.k2 = k2;
  sys.k = k1 + k2;
  sys.l = sys.k * sys.delta;
  const int l1 = a.l, l2 = k2 * sys.delta, l = sys.l;
  for (int i = 0; i <= m; ++i) {
    const Matrix B = detail::inflate(flipped[static_cast<std::size_t>(i)], k2);
    const Matrix& A = a.P[static_cast<std::size_t>(i)];
    // interleave so that P_0 stays diag(I_l, -I_l)
    Matrix P = Matrix::Zero(2 * l, 2 * l);
    for (int bi = 0; bi < 2; ++bi)
      for (int bj = 0; bj < 2; ++bj) {
        P.block(bi * l, bj * l, l1, l1) = A.block(bi * l1, bj * l1, l1, l1);
        P.block(bi * l + l1, bj * l + l1, l2, l2) = B.block(bi * l2, bj * l2, l2, l2);
      }
    sys.P.push_back(std::move(P));
  }
  return sys;
}

/// max |P_i P_j + P_j P_i - 2 delta_ij I|.
inline double anticommutation_residual(const CliffordSystem& sys) {
  double worst = 0.0;
  const int N = sys.dim();
  for (std::size_t i = 0; i < sys.P.size(); ++i)
    for (std::size_t j = i; j < sys.P.size(); ++j) {
      Matrix S = sys.P[i] * sys.P[j] + sys.P[j] * sys.P[i];
      if (i == j) S -= 2.0 * Matrix::Identity(N, N);
      worst = std::max(worst, S.cwiseAbs().maxCoeff());
    }
  return worst;
}

/// Validates shape, symmetry and anticommutation of a loaded system and
/// fills in l, delta and the multiplicities when absent.
inline void validate_clifford(CliffordSystem& sys, double tol = 1e-12) {
  if (sys.m < 1 || static_cast<int>(sys.P.size()) != sys.m + 1)
    throw DimensionMismatch("clifford system needs m + 1 matrices");
  const Eigen::Index N = sys.P.front().rows();
  if (N % 2 != 0) throw DimensionMismatch("clifford matrices must have even size");
  for (const Matrix& P : sys.P) {
    if (P.rows() != N || P.cols() != N) throw DimensionMismatch("clifford matrices differ in size");
    if (!is_symmetric(P, tol)) throw DimensionMismatch("clifford matrix is not symmetric");
  }
  sys.l = static_cast<int>(N / 2);
  sys.delta = clifford_delta(sys.m);
  if (sys.l % sys.delta != 0) throw DimensionMismatch("l is not a multiple of delta_m");
  const double res = anticommutation_residual(sys);
  if (!(res < tol)) throw DimensionMismatch("anticommutation residual " + std::to_string(res));
  sys.k = sys.l / sys.delta;
  if (sys.m % 4 == 0) {
    Matrix prod = Matrix::Identity(N, N);
    for (const Matrix& P : sys.P) prod = prod * P;
    // P_0...P_m is +-I on each irreducible module (dimension 2 delta)
    const int diff = static_cast<int>(std::lround(std::abs(prod.trace()) / (2 * sys.delta)));
    sys.k1 = (sys.k + diff) / 2;
    sys.k2 = (sys.k - diff) / 2;
  } else {
    sys.k1 = sys.k2 = 0;
  }
}

/// f(x) = |x|^4 - 2 sum <P_i x, x>^2 at x / |x|.
inline double otfkm_value(const CliffordSystem& sys, const Vector& x) {
  const Vector u = x / x.norm();
  double s = 0.0;
  for (const Matrix& P : sys.P) {
    const double a = u.dot(P * u);
    s += a * a;
  }
  return 1.0 - 2.0 * s;
}

/// Euclidean gradient of the polynomial, 4|x|^2 x - 8 sum <P_i x,x> P_i x.
inline Vector otfkm_gradient(const CliffordSystem& sys, const Vector& x) {
  Vector g = 4.0 * x.squaredNorm() * x;
  for (const Matrix& P : sys.P) {
    const Vector Px = P * x;
    g -= 8.0 * x.dot(Px) * Px;
  }
  return g;
}

/// Predicted dim c(Sigma) by m mod 8.
inline int predicted_centralizer_dim(const CliffordSystem& sys) {
  const int r = sys.m % 8;
  const int k = sys.k;
  auto so = [](int q) { return q * (q - 1) / 2; };
  auto sp = [](int q) { return q * (2 * q + 1); };
  switch (r) {
    case 1:
    case 7:
      return so(k);
    case 2:
    case 6:
      return k * k;
    case 3:
    case 5:
      return sp(k);
    case 4:
      return sp(sys.k1) + sp(sys.k2);
    default:
      return so(sys.k1) + so(sys.k2);
  }
}

inline const char* centralizer_type(const CliffordSystem& sys) {
  switch (sys.m % 8) {
    case 1:
    case 7:
      return "so(k)";
    case 2:
    case 6:
      return "u(k)";
    case 3:
    case 5:
      return "sp(k)";
    case 4:
      return "sp(k1)+sp(k2)";
    default:
      return "so(k1)+so(k2)";
  }
}

struct SkewBasis {
  std::vector<Matrix> elements;
  int dimension() const { return static_cast<int>(elements.size()); }
};

namespace detail {

/// Coordinates on so(d): one per strict upper-triangular entry.
inline Matrix skew_from_coords(const Vector& c, int d) {
  Matrix A = Matrix::Zero(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      A(i, j) = c(idx);
      A(j, i) = -c(idx);
      ++idx;
    }
  return A;
}

/// Null space of M by singular values; a value between null_tol and
/// gap_tol makes the rank ambiguous. The right singular vectors come from
/// the eigenvectors of M^T M, and each singular value is re-measured as
/// |M v| so that null directions are judged at full precision.
inline Matrix null_space(const Matrix& M, int cols, double null_tol, double gap_tol) {
  if (M.rows() == 0) return Matrix::Identity(cols, cols);
  Matrix G = Matrix::Zero(cols, cols);
  G.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
  G = G.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const Matrix& V = es.eigenvectors();
  std::vector<int> null_cols;
  for (int i = 0; i < cols; ++i) {
    const double sv = (M * V.col(i)).norm();
    if (sv > null_tol && sv < gap_tol)
      throw RankDeficiency("singular value " + std::to_string(sv) + " inside the ambiguity window");
    if (sv <= null_tol) null_cols.push_back(i);
  }
  Matrix N(cols, static_cast<Eigen::Index>(null_cols.size()));
  for (std::size_t c = 0; c < null_cols.size(); ++c) N.col(static_cast<Eigen::Index>(c)) = V.col(null_cols[c]);
  return N;
}

/// Reference null space from a full Jacobi SVD (small problems only).
inline Matrix null_space_svd(const Matrix& M, int cols, double null_tol) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  std::vector<int> null_cols;
  for (int i = 0; i < cols; ++i)
    if (i >= s.size() || s(i) <= null_tol) null_cols.push_back(i);
  Matrix N(cols, static_cast<Eigen::Index>(null_cols.size()));
  for (std::size_t c = 0; c < null_cols.size(); ++c) N.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(null_cols[c]);
  return N;
}

}  // namespace detail

inline constexpr double kNullTol = 1e-8;
inline constexpr double kRankGap = 1e-5;

/// Skew X commuting with all P_i. Writing X in the +-1 eigenbases of P_0,
/// X = U+ A U+^T + U- C A C^T U-^T with C = U-^T P_1 U+, and the remaining
/// conditions become [A, K_i] = 0 for K_i = C^T U-^T P_i U+, i >= 2. The
/// solve is on so(l) instead of so(2l).
inline SkewBasis centralizer(const CliffordSystem& sys) {
  const int l = sys.l, N = sys.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sys.P[0]);
  const Vector& ev = es.eigenvalues();
  if (std::abs(ev(0) + 1.0) > 1e-8 || std::abs(ev(l - 1) + 1.0) > 1e-8 || std::abs(ev(l) - 1.0) > 1e-8 ||
      std::abs(ev(N - 1) - 1.0) > 1e-8)
    throw DimensionMismatch("P_0 must have eigenvalues -1 and +1 with multiplicity l");
  const Matrix Um = es.eigenvectors().leftCols(l);
  const Matrix Up = es.eigenvectors().rightCols(l);
  const Matrix C = Um.transpose() * sys.P[1] * Up;

  const int d = l * (l - 1) / 2;
  std::vector<Matrix> K;
  for (std::size_t i = 2; i < sys.P.size(); ++i) K.push_back(C.transpose() * Um.transpose() * sys.P[i] * Up);

  // [A, K] is skew: keep the strict upper-triangular rows only.
  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(K.size()) * d, d);
  for (int c = 0; c < d; ++c) {
    const Matrix A = detail::skew_from_coords(Vector::Unit(d, c), l);
    for (std::size_t q = 0; q < K.size(); ++q) {
      const Matrix Cm = A * K[q] - K[q] * A;
      int row = static_cast<int>(q) * d;
      for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j) M(row++, c) = Cm(i, j);
    }
  }
  SkewBasis out;
  if (d == 0) return out;
  const Matrix Nsp = detail::null_space(M, d, kNullTol, kRankGap);
  for (Eigen::Index c = 0; c < Nsp.cols(); ++c) {
    const Matrix A = detail::skew_from_coords(Nsp.col(c), l);
    Matrix X = Up * A * Up.transpose() + Um * C * A * C.transpose() * Um.transpose();
    out.elements.push_back(0.5 * (X - X.transpose()));
  }
  return out;
}

/// Same space by brute force over all of so(2l); used to cross-check the
/// reduced solver on small systems.
inline SkewBasis centralizer_dense(const CliffordSystem& sys) {
  const int N = sys.dim();
  const int d = N * (N - 1) / 2;
  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(sys.P.size()) * N * N, d);
  for (int c = 0; c < d; ++c) {
    const Matrix X = detail::skew_from_coords(Vector::Unit(d, c), N);
    for (std::size_t q = 0; q < sys.P.size(); ++q) {
      const Matrix Cm = X * sys.P[q] - sys.P[q] * X;
      M.block(static_cast<Eigen::Index>(q) * N * N, c, N * N, 1) = Eigen::Map<const Vector>(Cm.data(), N * N);
    }
  }
  SkewBasis out;
  const Matrix Nsp = detail::null_space_svd(M, d, kNullTol);
  for (Eigen::Index c = 0; c < Nsp.cols(); ++c) out.elements.push_back(detail::skew_from_coords(Nsp.col(c), N));
  return out;
}

/// {1/2 P_i P_j : i < j}, a copy of so(m+1).
inline SkewBasis spin_lift(const CliffordSystem& sys) {
  SkewBasis out;
  for (std::size_t i = 0; i < sys.P.size(); ++i)
    for (std::size_t j = i + 1; j < sys.P.size(); ++j) out.elements.push_back(0.5 * sys.P[i] * sys.P[j]);
  return out;
}

/// Frobenius-orthonormal basis of a span. Spin lift and centralizer are
/// mutually orthogonal (tr(X P_i P_j) = 0 when X commutes with P_i), so
/// this is only needed within each block.
inline std::vector<Matrix> orthonormal_span(const std::vector<Matrix>& elements, double drop = 1e-10) {
  std::vector<Matrix> out;
  for (const Matrix& e : elements) {
    Matrix v = e;
    for (int pass = 0; pass < 2; ++pass)
      for (const Matrix& b : out) v -= (v.cwiseProduct(b).sum()) * b;
    const double len = v.norm();
    if (len > drop * std::max(1.0, e.norm())) out.push_back(v / len);
  }
  return out;
}

/// Max over random pairs X, Y in span(basis) of the distance from [X, Y]
/// to the span, relative to |[X, Y]| when that exceeds 1. The basis must be
/// Frobenius-orthogonal, which holds for spin_lift joined with centralizer.
inline double lie_closure_residual(const std::vector<Matrix>& basis, int pairs = 8, std::uint64_t seed = 7) {
  if (basis.empty()) return 0.0;
  std::vector<Matrix> onb;
  onb.reserve(basis.size());
  for (const Matrix& b : basis) onb.push_back(b / b.norm());
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    Matrix X = Matrix::Zero(basis.front().rows(), basis.front().cols());
    Matrix Y = X;
    for (const Matrix& b : onb) {
      X += rng.normal() * b;
      Y += rng.normal() * b;
    }
    const Matrix Z = X * Y - Y * X;
    Matrix proj = Z;
    for (const Matrix& b : onb) proj -= Z.cwiseProduct(b).sum() * b;
    worst = std::max(worst, proj.norm() / std::max(1.0, Z.norm()));
  }
  return worst;
}

struct CliffordPoint {
  std::vector<double> coefficients;  // a_i = <P_i y, y>
  Matrix P;
};

/// The unique P in the Clifford sphere with P y = y, for y on the focal set f = -1.
inline CliffordPoint find_clifford_point(const CliffordSystem& sys, const Vector& y) {
  if (y.size() != sys.dim()) throw DimensionMismatch("point has wrong dimension");
  const double fy = otfkm_value(sys, y);
  if (!(std::abs(fy + 1.0) < 1e-8)) throw NotOnFocalSet("f(y) = " + std::to_string(fy) + ", expected -1");
  const Vector u = y / y.norm();
  CliffordPoint out;
  out.P = Matrix::Zero(sys.dim(), sys.dim());
  double s = 0.0;
  for (const Matrix& P : sys.P) {
    const double a = u.dot(P * u);
    out.coefficients.push_back(a);
    out.P += a * P;
    s += a * a;
  }
  if (!(std::abs(s - 1.0) < 1e-8) || !((out.P * u - u).norm() < 1e-8))
    throw NotOnFocalSet("P y != y for the recovered P");
  return out;
}

/// dim g = m(m+1)/2 + dim c(Sigma); every basis element is checked to
/// preserve f at sample points.
inline int full_symmetry_dimension(const CliffordSystem& sys, int samples = 20, std::uint64_t seed = 3) {
  const SkewBasis spin = spin_lift(sys);
  const SkewBasis cent = centralizer(sys);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vector p = rng.unit_vector(sys.dim());
    const Vector g = otfkm_gradient(sys, p);
    for (const SkewBasis* B : {&spin, &cent})
      for (const Matrix& X : B->elements) {
        const double r = std::abs(g.dot(X * p)) / std::max(1.0, X.norm());
        if (!(r < 1e-8)) throw Error("symmetry generator does not preserve f (residual " + std::to_string(r) + ")");
      }
  }
  return spin.dimension() + cent.dimension();
}

struct CliffordAudit {
  double anticommutation = 0.0;
  bool multiplicities_ok = true;  // each P_i has eigenvalues +-1, l each
  int centralizer_dim = 0;
  int predicted_dim = 0;
  int spin_dim = 0;
  double closure_residual = 0.0;
};

inline CliffordAudit audit_clifford(const CliffordSystem& sys) {
  CliffordAudit a;
  a.anticommutation = anticommutation_residual(sys);
  for (const Matrix& P : sys.P) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(P, Eigen::EigenvaluesOnly);
    int plus = 0, minus = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double e = es.eigenvalues()(i);
      if (std::abs(e - 1.0) < 1e-8) ++plus;
      else if (std::abs(e + 1.0) < 1e-8) ++minus;
    }
    a.multiplicities_ok = a.multiplicities_ok && plus == sys.l && minus == sys.l;
  }
  const SkewBasis cent = centralizer(sys);
  const SkewBasis spin = spin_lift(sys);
  a.centralizer_dim = cent.dimension();
  a.predicted_dim = predicted_centralizer_dim(sys);
  a.spin_dim = spin.dimension();
  std::vector<Matrix> all = spin.elements;
  all.insert(all.end(), cent.elements.begin(), cent.elements.end());
  a.closure_residual = lie_closure_residual(all);
  return a;
}

/// Deviations: anticommutation and closure residuals, plus 1 for every
/// failed structural count (multiplicities, centralizer and spin dimension).
inline VerificationReport check_clifford_audit(const CliffordSystem& sys, double tol = 1e-10) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep("clifford-audit", tol);
  const CliffordAudit a = audit_clifford(sys);
  rep.add(a.anticommutation);
  rep.add(a.closure_residual);
  rep.add(a.multiplicities_ok ? 0.0 : 1.0);
  rep.add(std::abs(a.centralizer_dim - a.predicted_dim));
  rep.add(std::abs(a.spin_dim - sys.m * (sys.m + 1) / 2));
  rep.details = Json{{"m", sys.m},
                     {"l", sys.l},
                     {"k", sys.k},
                     {"delta", sys.delta},
                     {"centralizer_type", centralizer_type(sys)},
                     {"centralizer_dim", a.centralizer_dim},
                     {"predicted_dim", a.predicted_dim},
                     {"spin_dim", a.spin_dim},
                     {"anticommutation", a.anticommutation},
                     {"closure_residual", a.closure_residual},
                     {"multiplicities_ok", a.multiplicities_ok}};
  if (sys.m % 4 == 0) {
    rep.details["k1"] = sys.k1;
    rep.details["k2"] = sys.k2;
  }
  if (sys.m2() < 1) rep.details["warning"] = "m2 = l - m - 1 < 1: no isoparametric family";
  rep.finish();
  rep.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace finslab
