#pragma once

#include <cstdint>
#include <random>

#include "finslab/linalg.hpp"

namespace finslab {

/// splitmix64 finalizer; derives independent per-sample seeds from a base
/// seed so results do not depend on how work is split across threads.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  Vector normal_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  /// Uniform point on the unit sphere in R^n.
  Vector unit_vector(int n) {
    Vector v = normal_vector(n);
    while (v.norm() < 1e-8) v = normal_vector(n);
    return v / v.norm();
  }

  Matrix skew_matrix(int n) {
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = normal();
    return A - A.transpose();
  }

  /// Haar-distributed orthogonal matrix (QR with sign fix).
  Matrix orthogonal_matrix(int n) {
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = normal();
    Eigen::HouseholderQR<Matrix> qr(A);
    Matrix Q = qr.householderQ();
    Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
      if (R(i, i) < 0) Q.col(i) *= -1.0;
    return Q;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace finslab
