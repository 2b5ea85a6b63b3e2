#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "finslab/finslab.hpp"

namespace fs = std::filesystem;
using namespace finslab;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

// A flag value is inline JSON when it starts like JSON, otherwise a file path.
Json json_arg(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first != std::string::npos && (s[first] == '{' || s[first] == '[')) return parse_json(s, "<argument>");
  return read_json_file(s);
}

bool is_config_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const UnknownCheck*>(&e) || dynamic_cast<const WindTooStrong*>(&e) ||
         dynamic_cast<const UnsupportedSplit*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
         dynamic_cast<const LambdaOutOfRange*>(&e) || dynamic_cast<const NotSkew*>(&e);
}

void print_summary(const VerificationReport& r) {
  std::cout << r.check << ": " << (r.pass ? "pass" : "FAIL") << "  max_deviation=" << json_number(r.max_deviation)
            << "  tol=" << json_number(r.tolerance) << "  samples=" << r.n_samples << "  " << r.wall_time_ms
            << " ms\n";
  for (const auto& lv : r.levels)
    std::cout << "  level " << json_number(lv.level) << ": n=" << lv.count << " mean=" << json_number(lv.mean)
              << " spread=" << json_number(lv.spread) << '\n';
  if (r.details.contains("error")) std::cout << "  error: " << r.details["error"].get<std::string>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finslab: numerical checks for Randers spheres of constant flag curvature"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "run one check");
  std::string check;
  std::optional<int> n;
  std::optional<double> lambda, tol;
  std::string w_spec, clifford, metric, function = "otfkm", config_path;
  std::vector<double> levels;
  int per_level = 50, samples = 100, split = 1;
  std::uint64_t seed = 1;
  bool as_json = false, negate = false;
  verify->add_option("check", check, "flag-curvature | navigation-lemma | transnormal | isoparametric | "
                                     "tangency | spectrum | clifford-audit")
      ->required();
  verify->add_option("--n", n, "sphere dimension");
  verify->add_option("--lambda", lambda, "strength of the standard wind");
  verify->add_option("--w-spec", w_spec, "wind as JSON or a JSON file");
  verify->add_option("--clifford", clifford, "Clifford system as JSON or a JSON file");
  verify->add_option("--metric", metric, "round | randers")->check(CLI::IsMember({"round", "randers"}));
  verify->add_option("--function", function, "otfkm | height | two-block")
      ->check(CLI::IsMember({"otfkm", "height", "two-block"}));
  verify->add_option("--split", split, "first block size for two-block");
  verify->add_flag("--negate", negate, "use -f");
  verify->add_option("--levels", levels, "level values")->delimiter(',');
  verify->add_option("--per-level", per_level, "points per level");
  verify->add_option("--samples", samples, "number of samples");
  verify->add_option("--tol", tol, "tolerance");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--config", config_path, "experiment JSON; flags given on the command line override it");
  verify->add_flag("--json", as_json, "print the full JSON report");

  // clifford build | audit
  auto* cliff = app.add_subcommand("clifford", "build or audit a symmetric Clifford system");
  cliff->require_subcommand(1);
  auto* build = cliff->add_subcommand("build", "build a system and write it as JSON");
  int m = 1, k = 1;
  std::optional<int> k1, k2;
  std::string out_file;
  build->add_option("--m", m, "m")->required();
  build->add_option("--k", k, "copies of the irreducible module");
  build->add_option("--k1", k1, "copies of the first module (m divisible by 4)");
  build->add_option("--k2", k2, "copies of the second module (m divisible by 4)");
  build->add_option("--out", out_file, "output file (stdout if absent)");
  auto* audit = cliff->add_subcommand("audit", "audit a system file");
  std::string audit_file;
  audit->add_option("file", audit_file, "system JSON")->required();
  audit->add_option("--tol", tol, "tolerance");
  audit->add_flag("--json", as_json, "print the full JSON report");

  // batch
  auto* batch_cmd = app.add_subcommand("batch", "run a battery of experiments");
  std::string battery;
  std::string out_dir;
  batch_cmd->add_option("file", battery, "battery JSON")->required();
  batch_cmd->add_option("--out", out_dir, "directory for report.json and summary.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*verify) {
      Json j = config_path.empty() ? Json::object() : read_json_file(config_path);
      const fs::path base = config_path.empty() ? fs::path(".") : fs::path(config_path).parent_path();
      j["check"] = check;
      auto given = [&](const char* flag) { return verify->count(flag) > 0; };
      if (n) j["n"] = *n;
      if (lambda) j["lambda"] = *lambda;
      if (!w_spec.empty()) j["w_spec"] = json_arg(w_spec);
      if (!clifford.empty()) j["clifford"] = json_arg(clifford);
      if (!metric.empty()) j["metric"] = metric;
      else if (!j.contains("metric") && (lambda || !w_spec.empty()) && check != "tangency") j["metric"] = "randers";
      if (given("--function")) j["function"] = function;
      if (given("--split")) j["split"] = split;
      if (negate) j["negate"] = true;
      if (!levels.empty()) j["levels"] = levels;
      if (given("--per-level")) j["per_level"] = per_level;
      if (given("--samples")) j["samples"] = samples;
      if (tol) j["tol"] = *tol;
      if (given("--seed")) j["seed"] = seed;
      const ExperimentConfig cfg = config_from_json(j, base.empty() ? fs::path(".") : base);
      VerificationReport r;
      try {
        r = run(cfg);
      } catch (const Error& e) {
        if (is_config_error(e)) throw;
        // numerical breakdown during the check counts as a failed check
        r = VerificationReport(cfg.check, cfg.tolerance());
        r.config = config_echo(cfg);
        r.max_deviation = std::numeric_limits<double>::infinity();
        r.details = Json{{"error", e.what()}};
      }
      if (as_json) std::cout << to_json(r).dump(2) << '\n';
      else print_summary(r);
      return r.pass ? kPass : kFail;
    }

    if (*build) {
      const CliffordSystem sys = (k1 || k2) ? build_clifford(m, k1.value_or(0), k2.value_or(0)) : build_clifford(m, k);
      const std::string text = to_json(sys).dump() + "\n";
      if (out_file.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_file);
        if (!out) throw ConfigError("--out: cannot write " + out_file);
        out << text;
        std::cout << "wrote " << out_file << " (m=" << sys.m << ", l=" << sys.l << ")\n";
      }
      return kPass;
    }

    if (*audit) {
      const CliffordSystem sys = clifford_from_json(read_json_file(audit_file));
      VerificationReport r = check_clifford_audit(sys, tol.value_or(default_tolerance("clifford-audit")));
      r.config = Json{{"check", "clifford-audit"}, {"file", audit_file}, {"tol", r.tolerance}};
      if (as_json) std::cout << to_json(r).dump(2) << '\n';
      else {
        print_summary(r);
        for (const char* key : {"centralizer_type", "centralizer_dim", "predicted_dim", "spin_dim"})
          if (r.details.contains(key)) std::cout << "  " << key << ": " << r.details[key].dump() << '\n';
      }
      return r.pass ? kPass : kFail;
    }

    if (*batch_cmd) {
      const auto configs = load_battery(battery);
      const auto entries = batch(configs);
      const Json reports = batch_json(entries);
      std::cout << reports.dump(2) << '\n';
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream(fs::path(out_dir) / "report.json") << reports.dump(2) << '\n';
        std::ofstream csv(fs::path(out_dir) / "summary.csv");
        write_batch_csv(csv, entries);
      }
      bool ok = true;
      for (const auto& e : entries) {
        std::cerr << (e.ok ? "ok   " : "BAD  ") << e.report.check << (e.config.expect_fail ? " (expect_fail)" : "")
                  << "  max_deviation=" << json_number(e.report.max_deviation) << '\n';
        ok = ok && e.ok;
      }
      return ok ? kPass : kFail;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const UnknownCheck& e) {
    std::cerr << "unknown check: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kPass;
}
