#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "finslab/experiment.hpp"

using namespace finslab;
namespace fs = std::filesystem;

namespace {

int exit_code(const std::string& args, const fs::path& out = {}) {
  std::string cmd = std::string(FINSLAB_EXE) + " " + args;
  cmd += out.empty() ? " > /dev/null 2>&1" : " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "finslab_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("run dispatches to the checks") {
  auto rep = run(config_from_json(parse_json(R"({"check": "flag-curvature", "n": 2, "samples": 50})")));
  CHECK(rep.pass);
  CHECK(rep.max_deviation < 1e-5);

  rep = run(config_from_json(parse_json(R"({"check": "clifford-audit", "clifford": {"m": 1, "k": 3}})")));
  CHECK(rep.pass);
  CHECK(rep.details["centralizer_dim"] == 3);

  rep = run(config_from_json(parse_json(R"({"check": "transnormal", "metric": "randers",
      "clifford": {"m": 1, "k": 3}, "w_spec": {"random": true, "norm": 0.5}, "levels": [0.3], "per_level": 20})")));
  CHECK_FALSE(rep.pass);

  rep = run(config_from_json(parse_json(R"({"check": "navigation-lemma", "n": 3, "samples": 300})")));
  CHECK(rep.pass);
  CHECK(rep.config["tol"] == 1e-8);
}

TEST_CASE("config errors name the field") {
  CHECK_THROWS_AS(config_from_json(parse_json(R"({"check": "curvature"})")), UnknownCheck);
  CHECK_THROWS_WITH(config_from_json(parse_json(R"({"check": "spectrum", "tol": -1})")), Catch::Matchers::ContainsSubstring("tol"));
  CHECK_THROWS_WITH(config_from_json(parse_json(R"({"check": "spectrum", "samples": 0})")), Catch::Matchers::ContainsSubstring("samples"));
  CHECK_THROWS_WITH(config_from_json(parse_json(R"({"check": "spectrum", "colour": 1})")), Catch::Matchers::ContainsSubstring("colour"));
  CHECK_THROWS_WITH(config_from_json(parse_json(R"({"check": "spectrum", "w_spec": "missing.json"})")),
                    Catch::Matchers::ContainsSubstring("missing.json"));
  CHECK_THROWS_AS(run(config_from_json(parse_json(R"({"check": "transnormal", "function": "height"})"))), ConfigError);
  CHECK_THROWS_AS(run(config_from_json(parse_json(R"({"check": "flag-curvature", "n": 3, "metric": "randers", "lambda": 1.5})"))),
                  WindTooStrong);
}

TEST_CASE("parse errors carry the line") {
  const fs::path p = write("broken.json", "[\n  {\"check\": \"spectrum\"},\n  {\"check\" \"tangency\"}\n]\n");
  try {
    load_battery(p);
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("broken.json:3") != std::string::npos);
  }
}

TEST_CASE("reports are deterministic") {
  const auto cfg = config_from_json(parse_json(R"({"check": "isoparametric", "clifford": {"m": 1, "k": 3},
      "metric": "randers", "w_spec": {"clifford_combo": true, "norm": 0.5}, "levels": [0.2], "per_level": 10, "seed": 4})"));
  Json a = to_json(run(cfg)), b = to_json(run(cfg));
  a.erase("wall_time_ms");
  b.erase("wall_time_ms");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("batch") {
  CHECK(batch({}).empty());
  CHECK(batch_json({}).dump() == "[]");

  const auto configs = load_battery(write("neg.json", R"({"experiments": [
    {"check": "flag-curvature", "n": 2, "samples": 10},
    {"check": "tangency", "clifford": {"m": 1, "k": 3}, "w_spec": {"random": true, "norm": 0.5}, "expect_fail": true}
  ]})"));
  const auto entries = batch(configs);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].ok);
  CHECK_FALSE(entries[1].report.pass);
  CHECK(entries[1].ok);

  std::ostringstream csv;
  write_batch_csv(csv, entries);
  const std::string text = csv.str();
  CHECK(text.substr(0, text.find('\n')) == "check,n,pass,max_deviation,wall_time_ms");
  CHECK(text.find("flag-curvature,2,true,") != std::string::npos);
  CHECK(text.find("tangency,5,false,") != std::string::npos);

  // a breakdown inside one experiment does not stop the others
  const auto mixed = batch(load_battery(write("mixed.json",
      R"([{"check": "transnormal", "clifford": {"m": 1, "k": 3}, "levels": [3.0], "per_level": 2},
          {"check": "flag-curvature", "n": 2, "samples": 5}])")));
  CHECK_FALSE(mixed[0].report.pass);
  CHECK(mixed[0].report.details.contains("error"));
  CHECK(mixed[1].ok);
}

TEST_CASE("exit codes") {
  CHECK(exit_code("verify flag-curvature --n 2 --samples 50") == 0);
  CHECK(exit_code("verify clifford-audit --clifford '{\"m\": 1, \"k\": 3}'") == 0);
  CHECK(exit_code("verify transnormal --clifford '{\"m\": 1, \"k\": 3}' --metric randers "
                  "--w-spec '{\"random\": true, \"norm\": 0.5}' --levels 0.3 --per-level 20") == 1);
  CHECK(exit_code("verify curvature") == 2);
  CHECK(exit_code("verify flag-curvature --n 3 --lambda 1.2") == 2);
  CHECK(exit_code("verify spectrum --tol -1") == 2);
  CHECK(exit_code("verify") == 2);
  CHECK(exit_code("frobnicate") == 2);

  const fs::path empty = write("empty.json", "[]");
  const fs::path out = scratch() / "stdout.txt";
  CHECK(exit_code("batch " + empty.string(), out) == 0);
  CHECK(parse_json(slurp(out)) == Json::array());

  const fs::path bad = write("bad.json", "{\n\"experiments\": [\n}\n");
  CHECK(exit_code("batch " + bad.string()) == 2);

  const fs::path neg = write("negative.json", R"([
    {"check": "tangency", "clifford": {"m": 1, "k": 3}, "w_spec": {"random": true, "norm": 0.5}, "expect_fail": true}
  ])");
  CHECK(exit_code("batch " + neg.string()) == 0);
}

TEST_CASE("clifford subcommands") {
  const fs::path sys = scratch() / "sys.json";
  fs::remove(sys);
  CHECK(exit_code("clifford build --m 3 --k 2 --out " + sys.string()) == 0);
  const Json j = parse_json(slurp(sys));
  CHECK(j["m"] == 3);
  CHECK(j["l"] == 8);
  CHECK(j["matrices"].size() == 4);
  CHECK(exit_code("clifford audit " + sys.string()) == 0);
  CHECK(exit_code("clifford build --m 3 --k1 1 --k2 1") == 2);
  CHECK(exit_code("clifford audit " + (scratch() / "nope.json").string()) == 2);
}

TEST_CASE("report schema order") {
  const fs::path out = scratch() / "report.txt";
  REQUIRE(exit_code("verify tangency --clifford '{\"m\": 2, \"k\": 1}' --w-spec '{\"spin\": [0, 1], \"norm\": 0.5}' --json",
                    out) == 0);
  const std::string text = slurp(out);
  std::size_t last = 0;
  for (const char* key : {"\"check\"", "\"config\"", "\"n_samples\"", "\"max_deviation\"", "\"levels\"", "\"pass\"",
                          "\"wall_time_ms\""}) {
    const std::size_t at = text.find(key);
    REQUIRE(at != std::string::npos);
    CHECK(at >= last);
    last = at;
  }
}

TEST_CASE("shipped battery") {
  const fs::path out = scratch() / "suite";
  fs::remove_all(out);
  CHECK(exit_code("batch " + (fs::path(FINSLAB_CONFIGS) / "paper_suite.json").string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "summary.csv"));
}
