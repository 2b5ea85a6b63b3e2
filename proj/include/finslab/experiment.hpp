#pragma once

// Experiment configuration, dispatch to the named checks, and batteries.

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "finslab/clifford.hpp"
#include "finslab/curvature.hpp"
#include "finslab/errors.hpp"
#include "finslab/io.hpp"
#include "finslab/isoparametric.hpp"
#include "finslab/navigation.hpp"
#include "finslab/report.hpp"
#include "finslab/sphere.hpp"

namespace finslab {

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"flag-curvature", "navigation-lemma", "transnormal", "isoparametric",
                                              "tangency",       "spectrum",         "clifford-audit"};
  return names;
}

inline double default_tolerance(const std::string& check) {
  static const std::map<std::string, double> tol{{"flag-curvature", 1e-4}, {"navigation-lemma", 1e-8},
                                                 {"transnormal", 1e-6},    {"isoparametric", 1e-3},
                                                 {"tangency", 1e-8},       {"spectrum", 1e-3},
                                                 {"clifford-audit", 1e-10}};
  const auto it = tol.find(check);
  if (it == tol.end()) throw UnknownCheck("\"" + check + "\"");
  return it->second;
}

struct ExperimentConfig {
  std::string check;
  std::optional<int> n;
  std::string metric = "round";     // round | randers
  std::optional<double> lambda;     // shorthand for the standard wind
  Json w_spec;                      // see killing_from_json; null if unset
  std::string function = "otfkm";   // otfkm | height | two-block
  Json clifford;                    // system or build request; null if unset
  int split = 1;                    // two-block: size of the first block
  bool negate = false;              // use -f
  std::vector<double> levels{0.0};
  int per_level = 50;
  int samples = 100;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  bool expect_fail = false;
  Json wind;                        // navigation-lemma: wind vector (array)
  Json base;                        // navigation-lemma: base norm JSON
  std::filesystem::path base_dir;   // for relative file references

  double tolerance() const { return tol ? *tol : default_tolerance(check); }
};

namespace detail {

template <class T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

/// Inline JSON, or a string naming a JSON file relative to base_dir.
inline Json inline_or_file(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_string()) return j;
  std::filesystem::path p = j.get<std::string>();
  if (p.is_relative()) p = base_dir / p;
  return read_json_file(p);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = ".") {
  if (!j.is_object()) throw ConfigError("experiment: expected an object");
  static const std::vector<std::string> allowed{"check", "n",     "metric", "lambda", "w_spec",    "function",
                                                "clifford", "split", "negate", "levels", "per_level", "samples",
                                                "tol",   "seed",  "expect_fail", "wind", "base", "name"};
  for (const auto& item : j.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError(item.key() + ": unknown field");
  ExperimentConfig c;
  c.base_dir = base_dir;
  if (!j.contains("check") || !j["check"].is_string()) throw ConfigError("check: missing");
  c.check = j["check"].get<std::string>();
  default_tolerance(c.check);  // UnknownCheck
  if (j.contains("n")) c.n = detail::field<int>(j, "n", 0);
  c.metric = detail::field<std::string>(j, "metric", c.metric);
  if (c.metric != "round" && c.metric != "randers") throw ConfigError("metric: expected round or randers");
  if (j.contains("lambda")) c.lambda = detail::field<double>(j, "lambda", 0.0);
  if (j.contains("w_spec")) c.w_spec = detail::inline_or_file(j["w_spec"], base_dir);
  c.function = detail::field<std::string>(j, "function", c.function);
  if (c.function != "otfkm" && c.function != "height" && c.function != "two-block")
    throw ConfigError("function: expected otfkm, height or two-block");
  if (j.contains("clifford")) c.clifford = detail::inline_or_file(j["clifford"], base_dir);
  c.split = detail::field<int>(j, "split", c.split);
  c.negate = detail::field<bool>(j, "negate", c.negate);
  c.levels = detail::field<std::vector<double>>(j, "levels", c.levels);
  c.per_level = detail::field<int>(j, "per_level", c.per_level);
  c.samples = detail::field<int>(j, "samples", c.samples);
  if (j.contains("tol")) c.tol = detail::field<double>(j, "tol", 0.0);
  c.seed = detail::field<std::uint64_t>(j, "seed", c.seed);
  c.expect_fail = detail::field<bool>(j, "expect_fail", c.expect_fail);
  if (j.contains("wind")) c.wind = j["wind"];
  if (j.contains("base")) c.base = detail::inline_or_file(j["base"], base_dir);
  if (c.tol && !(*c.tol > 0.0)) throw ConfigError("tol: must be > 0");
  if (c.samples < 1) throw ConfigError("samples: must be >= 1");
  if (c.per_level < 1) throw ConfigError("per_level: must be >= 1");
  if (c.n && *c.n < 1) throw ConfigError("n: must be >= 1");
  return c;
}

/// Config echo for reports: the effective values, in a fixed order. n is
/// the sphere dimension actually used (derived from the Clifford system when
/// the config leaves it out).
inline Json config_echo(const ExperimentConfig& c, std::optional<int> n = std::nullopt) {
  Json j;
  j["check"] = c.check;
  if (n || c.n) j["n"] = n ? *n : *c.n;
  j["metric"] = c.metric;
  if (c.lambda) j["lambda"] = *c.lambda;
  if (!c.w_spec.is_null()) j["w_spec"] = c.w_spec;
  const bool on_levels = c.check == "transnormal" || c.check == "isoparametric" || c.check == "spectrum";
  if (on_levels || c.check == "tangency") j["function"] = c.function;
  if (!c.clifford.is_null()) {
    if (c.clifford.contains("matrices")) j["clifford"] = Json{{"m", c.clifford["m"]}, {"l", c.clifford.value("l", 0)}};
    else j["clifford"] = c.clifford;
  }
  if (c.function == "two-block") j["split"] = c.split;
  if (c.negate) j["negate"] = true;
  if (on_levels) {
    j["levels"] = c.levels;
    j["per_level"] = c.per_level;
  } else if (c.check != "clifford-audit") {
    j["samples"] = c.samples;
  }
  j["tol"] = c.tolerance();
  j["seed"] = c.seed;
  if (c.expect_fail) j["expect_fail"] = true;
  if (!c.wind.is_null()) j["wind"] = c.wind;
  if (!c.base.is_null()) j["base"] = c.base;
  return j;
}

namespace detail {

struct Setup {
  std::optional<CliffordSystem> sys;
  std::optional<SphereFunction> f;
  int n = 0;
};

inline Setup function_setup(const ExperimentConfig& c) {
  Setup s;
  if (c.function == "otfkm") {
    s.sys = c.clifford.is_null() ? build_clifford(1, 3) : clifford_from_json(c.clifford);
    s.n = s.sys->dim() - 1;
    if (c.n && *c.n != s.n)
      throw ConfigError("n: the clifford system lives on S^" + std::to_string(s.n) + ", config says " +
                        std::to_string(*c.n));
    s.f = SphereFunction::otfkm(*s.sys);
  } else {
    if (!c.n) throw ConfigError("n: required for function " + c.function);
    s.n = *c.n;
    if (c.function == "height") {
      s.f = SphereFunction::height(Vector::Unit(s.n + 1, 0));  // the axis fixed by standard_wind for even n
    } else {
      if (c.split < 1 || c.split > s.n) throw ConfigError("split: must lie in [1, n]");
      s.f = SphereFunction::two_block(c.split, s.n + 1 - c.split);
    }
    if (!c.clifford.is_null()) s.sys = clifford_from_json(c.clifford);
  }
  if (c.negate) s.f = s.f->negated();
  return s;
}

inline KillingField wind_for(const ExperimentConfig& c, int n, const CliffordSystem* sys) {
  if (!c.w_spec.is_null()) return killing_from_json(c.w_spec, n + 1, sys);
  if (c.lambda) {
    if (std::abs(*c.lambda) >= 1.0) throw WindTooStrong("lambda = " + std::to_string(*c.lambda) + " must be < 1");
    return standard_wind(n, *c.lambda);
  }
  throw ConfigError("w_spec: randers metric needs w_spec or lambda");
}

inline MetricField metric_for(const ExperimentConfig& c, int n, const CliffordSystem* sys) {
  const Chart chart = Chart::centered_at(Vector::Unit(n + 1, n));
  if (c.metric == "round") return round_metric(chart);
  return randers_sphere(chart, wind_for(c, n, sys));
}

}  // namespace detail

/// Runs one experiment. Configuration problems surface as ConfigError (or
/// the specific construction error, e.g. WindTooStrong).
inline VerificationReport run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  const double tol = c.tolerance();
  VerificationReport rep;
  std::optional<int> dim = c.n;
  if (c.check == "flag-curvature") {
    const int n = c.n.value_or(3);
    dim = n;
    const MetricField m = detail::metric_for(c, n, nullptr);
    rep = check_flag_curvature(m, c.samples, c.seed, tol);
  } else if (c.check == "navigation-lemma") {
    const int n = c.n.value_or(3);
    dim = n;
    const NormEvaluator F = c.base.is_null() ? NormEvaluator::euclidean(n) : norm_from_json(c.base);
    if (F.dim() != n) throw ConfigError("base: norm dimension differs from n");
    Vector v = Vector::Zero(n);
    if (!c.wind.is_null()) v = vector_from_json(c.wind, "wind");
    else v(0) = c.lambda.value_or(0.3);
    if (v.size() != n) throw ConfigError("wind: length differs from n");
    const NavigationDatum datum(F, v);
    Rng rng(c.seed);
    const Vector y = rng.unit_vector(n);
    const Vector u = rng.normal_vector(n);
    rep = check_navigation_lemma(datum, y, u, c.samples, c.seed, tol);
  } else if (c.check == "clifford-audit") {
    const CliffordSystem sys = c.clifford.is_null() ? build_clifford(1, 3) : clifford_from_json(c.clifford);
    dim = sys.dim() - 1;
    rep = check_clifford_audit(sys, tol);
  } else {
    const detail::Setup s = detail::function_setup(c);
    const CliffordSystem* sys = s.sys ? &*s.sys : nullptr;
    dim = s.n;
    if (c.check == "tangency") {
      rep = check_tangency(*s.f, detail::wind_for(c, s.n, sys), c.samples, c.seed, tol);
    } else {
      const MetricField m = detail::metric_for(c, s.n, sys);
      if (c.check == "transnormal") rep = check_transnormal(m, *s.f, c.levels, c.per_level, c.seed, tol);
      else if (c.check == "isoparametric") rep = check_isoparametric(m, *s.f, c.levels, c.per_level, c.seed, tol);
      else if (c.check == "spectrum") rep = check_spectrum(m, *s.f, c.levels, c.per_level, c.seed, tol);
      else throw UnknownCheck("\"" + c.check + "\"");
    }
  }
  rep.check = c.check;
  rep.config = config_echo(c, dim);
  rep.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

struct BatchEntry {
  ExperimentConfig config;
  VerificationReport report;
  bool ok = false;  // pass, or failure when expect_fail
};

/// A battery is a JSON array of experiment objects, or {"experiments": [...]}.
inline std::vector<ExperimentConfig> load_battery(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  const Json& list = doc.is_object() && doc.contains("experiments") ? doc["experiments"] : doc;
  if (!list.is_array()) throw ConfigError("battery: expected an array of experiments");
  std::vector<ExperimentConfig> out;
  const auto dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  for (std::size_t i = 0; i < list.size(); ++i) {
    try {
      out.push_back(config_from_json(list[i], dir));
    } catch (const Error& e) {
      throw ConfigError("experiment " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

/// Runs the experiments in order. A numerical failure inside one experiment
/// is recorded in its report rather than aborting the battery.
inline std::vector<BatchEntry> batch(const std::vector<ExperimentConfig>& configs) {
  std::vector<BatchEntry> out;
  for (const ExperimentConfig& c : configs) {
    BatchEntry e;
    e.config = c;
    try {
      e.report = run(c);
    } catch (const Error& err) {
      e.report = VerificationReport(c.check, c.tolerance());
      e.report.config = config_echo(c);
      e.report.max_deviation = std::numeric_limits<double>::infinity();
      e.report.pass = false;
      e.report.details = Json{{"error", err.what()}};
    }
    e.ok = e.report.pass != c.expect_fail;
    out.push_back(std::move(e));
  }
  return out;
}

inline Json batch_json(const std::vector<BatchEntry>& entries) {
  Json arr = Json::array();
  for (const BatchEntry& e : entries) arr.push_back(to_json(e.report));
  return arr;
}

/// CSV columns check, n, pass, max_deviation, wall_time_ms.
inline void write_batch_csv(std::ostream& out, const std::vector<BatchEntry>& entries) {
  out << "check,n,pass,max_deviation,wall_time_ms\n";
  out.precision(17);
  for (const BatchEntry& e : entries) {
    const Json& cfg = e.report.config;
    std::string n = cfg.contains("n") ? std::to_string(cfg["n"].get<int>()) : "";
    out << e.report.check << ',' << n << ',' << (e.report.pass ? "true" : "false") << ','
        << json_number(e.report.max_deviation) << ',' << e.report.wall_time_ms << '\n';
  }
}

}  // namespace finslab
