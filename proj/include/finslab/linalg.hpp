#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "finslab/dual.hpp"

namespace finslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense row-major square matrix over an arbitrary (possibly dual) scalar.
template <class S>
struct SquareOf {
  int n = 0;
  std::vector<S> a;

  SquareOf() = default;
  explicit SquareOf(int dim) : n(dim), a(static_cast<std::size_t>(dim * dim), S(0.0)) {}
  S& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  const S& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
};

/// Solves A x = b for symmetric positive definite A by LDL^T without
/// pivoting. Works for dual scalars, which rules out value comparisons.
template <class S>
std::vector<S> solve_spd(SquareOf<S> A, std::vector<S> b) {
  const int n = A.n;
  std::vector<S> diag(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    S dj = A(j, j);
    for (int k = 0; k < j; ++k) dj -= A(j, k) * A(j, k) * diag[k];
    diag[j] = dj;
    for (int i = j + 1; i < n; ++i) {
      S lij = A(i, j);
      for (int k = 0; k < j; ++k) lij -= A(i, k) * A(j, k) * diag[k];
      A(i, j) = lij / dj;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < i; ++k) b[i] -= A(i, k) * b[k];
  for (int i = 0; i < n; ++i) b[i] = b[i] / diag[i];
  for (int i = n - 1; i >= 0; --i)
    for (int k = i + 1; k < n; ++k) b[i] -= A(k, i) * b[k];
  return b;
}

inline Matrix values_of(const SquareOf<double>& A) {
  Matrix M(A.n, A.n);
  for (int i = 0; i < A.n; ++i)
    for (int j = 0; j < A.n; ++j) M(i, j) = A(i, j);
  return M;
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Vector lifted to a dual scalar type with zero derivative parts.
template <class S>
std::vector<S> lift(const Vector& v) {
  std::vector<S> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = S(v(i));
  return out;
}

inline bool is_symmetric(const Matrix& M, double tol) {
  return M.rows() == M.cols() && (M - M.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

}  // namespace finslab
