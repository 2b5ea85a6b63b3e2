#pragma once

// JSON forms of norms, matrices, Killing fields and Clifford systems.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "finslab/clifford.hpp"
#include "finslab/errors.hpp"
#include "finslab/linalg.hpp"
#include "finslab/minkowski.hpp"
#include "finslab/random.hpp"
#include "finslab/report.hpp"
#include "finslab/sphere.hpp"

namespace finslab {

/// Parses JSON text; syntax errors become ParseError with a 1-based line.
inline Json parse_json(const std::string& text, const std::string& source = "<input>") {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(source + ":" + std::to_string(line) + ": " + e.what());
  }
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

inline Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vector vector_from_json(const Json& j, const std::string& field = "vector") {
  if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(field + ": expected numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

/// Square matrix from nested rows or a flat row-major array.
inline Matrix matrix_from_json(const Json& j, const std::string& field = "matrix") {
  if (!j.is_array() || j.empty()) throw ConfigError(field + ": expected a non-empty array");
  if (j.front().is_array()) {
    const std::size_t n = j.size();
    Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j.front().size()));
    for (std::size_t i = 0; i < n; ++i) {
      if (!j[i].is_array() || j[i].size() != j.front().size()) throw ConfigError(field + ": ragged rows");
      for (std::size_t c = 0; c < j[i].size(); ++c) {
        if (!j[i][c].is_number()) throw ConfigError(field + ": expected numbers");
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
      }
    }
    return M;
  }
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (static_cast<std::size_t>(n * n) != j.size()) throw ConfigError(field + ": flat array is not square");
  const Vector flat = vector_from_json(j, field);
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < n; ++c) M(i, c) = flat(i * n + c);
  return M;
}

inline Json to_json(const NormEvaluator& N) {
  Json j;
  j["kind"] = to_string(N.kind());
  j["alpha"] = matrix_to_json(N.alpha());
  j["beta"] = vector_to_json(N.beta());
  return j;
}

/// {"kind": "randers" | "quadratic", "alpha": matrix, "beta": array}
inline NormEvaluator norm_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("alpha")) throw ConfigError("norm: expected an object with \"alpha\"");
  const std::string kind = j.value("kind", std::string("randers"));
  Matrix alpha = matrix_from_json(j["alpha"], "norm.alpha");
  if (kind == "quadratic" || kind == "euclidean-quadratic-form") return NormEvaluator::quadratic(std::move(alpha));
  if (kind != "randers") throw ConfigError("norm.kind: unknown kind \"" + kind + "\"");
  if (!j.contains("beta")) throw ConfigError("norm.beta: missing");
  return NormEvaluator::randers(std::move(alpha), vector_from_json(j["beta"], "norm.beta"));
}

inline Json to_json(const CliffordSystem& sys) {
  Json j;
  j["m"] = sys.m;
  j["l"] = sys.l;
  j["k"] = sys.k;
  if (sys.m % 4 == 0) {
    j["k1"] = sys.k1;
    j["k2"] = sys.k2;
  }
  Json mats = Json::array();
  for (const Matrix& P : sys.P) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < P.cols(); ++c) row.push_back(static_cast<int>(std::lround(P(i, c))));
      rows.push_back(std::move(row));
    }
    mats.push_back(std::move(rows));
  }
  j["matrices"] = std::move(mats);
  return j;
}

/// Either a full system {"m", "matrices", ...} (validated) or a build
/// request {"m", "k"} / {"m", "k1", "k2"}.
inline CliffordSystem clifford_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("m")) throw ConfigError("clifford: expected an object with \"m\"");
  const int m = j["m"].get<int>();
  if (!j.contains("matrices")) {
    if (j.contains("k1") || j.contains("k2")) return build_clifford(m, j.value("k1", 0), j.value("k2", 0));
    return build_clifford(m, j.value("k", 1));
  }
  CliffordSystem sys;
  sys.m = m;
  for (const Json& M : j["matrices"]) sys.P.push_back(matrix_from_json(M, "clifford.matrices"));
  validate_clifford(sys);
  if (j.contains("l") && j["l"].get<int>() != sys.l) throw ConfigError("clifford.l: does not match matrix size");
  return sys;
}

/// W-spec. Accepted forms:
///   {"n0": 1, "lambdas": [0.3], "sizes": [1]}      block normal form
///   {"matrix": [[...]]} or a bare (nested or flat) array
///   {"lambda": 0.4}                                  lambda J (or diag(0, lambda J))
///   {"spin": [i, j], "norm": 0.5}                    scaled P_i P_j (needs a system)
///   {"clifford_combo": true, "norm": 0.5, "seed": 3} random element of spin lift + centralizer
///   {"random": true, "norm": 0.5, "seed": 3}         random skew matrix
inline KillingField killing_from_json(const Json& j, int ambient_dim, const CliffordSystem* sys = nullptr) {
  auto scaled_to = [](const Matrix& W, double norm) {
    const double len = killing_norm(W);
    if (!(len > 0.0)) throw ConfigError("w_spec: generator is zero");
    return KillingField(W * (norm / len));
  };
  if (j.is_array()) return KillingField(matrix_from_json(j, "w_spec"));
  if (!j.is_object()) throw ConfigError("w_spec: expected an object or array");
  KillingField W;
  if (j.contains("matrix")) {
    W = KillingField(matrix_from_json(j["matrix"], "w_spec.matrix"));
  } else if (j.contains("lambdas")) {
    std::vector<int> sizes = j.value("sizes", std::vector<int>{});
    W = block_killing(j.value("n0", 0), j["lambdas"].get<std::vector<double>>(), sizes, ambient_dim);
  } else if (j.contains("spin")) {
    if (!sys) throw ConfigError("w_spec.spin: needs a clifford system");
    const auto ij = j["spin"].get<std::vector<int>>();
    if (ij.size() != 2 || ij[0] < 0 || ij[1] < 0 || ij[0] > sys->m || ij[1] > sys->m || ij[0] == ij[1])
      throw ConfigError("w_spec.spin: expected two distinct indices in [0, m]");
    W = scaled_to(sys->P[ij[0]] * sys->P[ij[1]], j.value("norm", 0.5));
  } else if (j.value("clifford_combo", false)) {
    if (!sys) throw ConfigError("w_spec.clifford_combo: needs a clifford system");
    Rng rng(j.value("seed", std::uint64_t{3}));
    Matrix M = Matrix::Zero(sys->dim(), sys->dim());
    for (const Matrix& X : spin_lift(*sys).elements) M += rng.normal() * X;
    for (const Matrix& X : centralizer(*sys).elements) M += rng.normal() * X;
    W = scaled_to(M, j.value("norm", 0.5));
  } else if (j.value("random", false)) {
    Rng rng(j.value("seed", std::uint64_t{3}));
    W = scaled_to(rng.skew_matrix(ambient_dim), j.value("norm", 0.5));
  } else if (j.contains("lambda")) {
    W = standard_wind(ambient_dim - 1, j["lambda"].get<double>());
  } else {
    throw ConfigError("w_spec: unrecognized form");
  }
  if (W.ambient_dim() != ambient_dim)
    throw ConfigError("w_spec: matrix is " + std::to_string(W.ambient_dim()) + "x" + std::to_string(W.ambient_dim()) +
                      ", sphere needs " + std::to_string(ambient_dim));
  return W;
}

inline Json killing_to_json(const KillingField& W) { return Json{{"matrix", matrix_to_json(W.matrix())}}; }

}  // namespace finslab
