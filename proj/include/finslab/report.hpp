#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace finslab {

using Json = nlohmann::ordered_json;

struct LevelStats {
  double level = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double spread = 0.0;  // max - min of the checked quantity on this level
};

/// Outcome of one verification run. pass <=> max_deviation < tolerance.
struct VerificationReport {
  std::string check;
  Json config = Json::object();
  std::size_t n_samples = 0;
  double max_deviation = 0.0;
  std::vector<LevelStats> levels;
  bool pass = false;
  std::int64_t wall_time_ms = 0;
  Json details = Json::object();

  // not serialized
  double tolerance = 0.0;
  std::vector<double> deviations;

  VerificationReport() = default;
  VerificationReport(std::string name, double tol) : check(std::move(name)), tolerance(tol) {}

  void add(double deviation) {
    deviations.push_back(std::isnan(deviation) ? std::numeric_limits<double>::infinity() : deviation);
  }

  void finish() {
    n_samples = deviations.size();
    max_deviation = 0.0;
    for (double d : deviations) max_deviation = std::max(max_deviation, d);
    for (const LevelStats& s : levels) max_deviation = std::max(max_deviation, s.spread);
    pass = max_deviation < tolerance;
  }

  /// Levels contribute their spread; the samples are the per-point values.
  static LevelStats level_stats(double level, const std::vector<double>& values) {
    LevelStats s;
    s.level = level;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0, lo = values.front(), hi = values.front();
    for (double v : values) {
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    s.spread = hi - lo;
    return s;
  }
};

inline double json_number(double x) {
  // JSON has no infinity; clamp so reports stay parseable.
  if (std::isinf(x)) return x > 0 ? std::numeric_limits<double>::max() : -std::numeric_limits<double>::max();
  return std::isnan(x) ? std::numeric_limits<double>::max() : x;
}

inline Json to_json(const VerificationReport& r) {
  Json j;
  j["check"] = r.check;
  j["config"] = r.config;
  j["n_samples"] = r.n_samples;
  j["max_deviation"] = json_number(r.max_deviation);
  Json levels = Json::array();
  for (const LevelStats& s : r.levels)
    levels.push_back(Json{{"level", s.level}, {"count", s.count}, {"mean", json_number(s.mean)},
                          {"spread", json_number(s.spread)}});
  j["levels"] = std::move(levels);
  j["pass"] = r.pass;
  j["wall_time_ms"] = r.wall_time_ms;
  j["details"] = r.details;
  return j;
}

}  // namespace finslab
