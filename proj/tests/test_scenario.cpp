#include <doctest.h>

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "triosc/csv.hpp"
#include "triosc/dynamics.hpp"
#include "triosc/errors.hpp"
#include "triosc/phasespace.hpp"
#include "triosc/scenario.hpp"

using namespace triosc;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("triosc-scenario-" + tag);
  fs::remove_all(dir);
  return dir;
}

const char* kBaseConfig = R"({
  "couplings": [0.25, 0.3, 0.3],
  "state": {"kind": "thermal", "occupations": [1, 1, 1]},
  "time": {"start": 0, "end": 2, "steps": 3},
  "analyses": [
    {"kind": "squeezing", "mode_sets": [[3], [1, 2], [1, 2, 3]], "reference": true}
  ]
})";

}  // namespace

TEST_CASE("format_double prefers the shortest round-trip form") {
  CHECK(format_double(0.3) == "0.3");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-1.5) == "-1.5");
  for (double v : {1.0 / 3.0, 1.3810978455418155, 7.75e-07, 1e300, -2.2250738585072014e-308}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("csv writer quotes only what needs quoting") {
  const fs::path dir = fresh_dir("csv");
  fs::create_directories(dir);
  CsvTable t;
  t.comments = {"note one"};
  t.header = {"a", "b"};
  t.rows.push_back({"plain", "with,comma"});
  t.rows.push_back({"with\"quote", "with\nnewline"});
  const fs::path path = dir / "t.csv";
  write_csv(path.string(), t);
  CHECK(read_file(path) ==
        "# note one\n"
        "a,b\n"
        "plain,\"with,comma\"\n"
        "\"with\"\"quote\",\"with\nnewline\"\n");
  // Rewriting produces identical bytes and leaves no temp file behind.
  const std::string first = read_file(path);
  write_csv(path.string(), t);
  CHECK(read_file(path) == first);
  CHECK(!fs::exists(path.string() + ".tmp"));
  fs::remove_all(dir);
}

TEST_CASE("csv writer fails cleanly when the directory is missing") {
  const fs::path dir = fresh_dir("csv-missing");
  CsvTable t;
  t.header = {"a"};
  const fs::path path = dir / "nope" / "t.csv";
  CHECK_THROWS_AS(write_csv(path.string(), t), IoError);
  CHECK(!fs::exists(path));
}

TEST_CASE("time grids are inclusive and exact on representable steps") {
  const TimeGrid grid{0.0, 2.0, 5};
  const std::vector<double> expected{0.0, 0.5, 1.0, 1.5, 2.0};
  CHECK(grid.times() == expected);
  const TimeGrid single{3.5, 99.0, 1};
  CHECK(single.times() == std::vector<double>{3.5});
}

TEST_CASE("scenario parsing accepts the base config") {
  const Scenario sc = parse_scenario(kBaseConfig);
  CHECK(sc.couplings.lambda1 == 0.25);
  CHECK(sc.state.kind == StateKind::thermal);
  CHECK(sc.grid.steps == 3);
  REQUIRE(sc.analyses.size() == 1);
  CHECK(sc.analyses[0].kind == "squeezing");
  CHECK(sc.analyses[0].reference);
  CHECK(sc.analyses[0].mode_sets.size() == 3);
  CHECK(sc.output_dir == "out");
}

TEST_CASE("scenario parsing rejects malformed configs with field paths") {
  CHECK_THROWS_WITH_AS(parse_scenario("{"), doctest::Contains("not valid JSON"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario("[]"), "config: top level must be an object",
                       std::invalid_argument);

  auto mutated = [](const std::string& from, const std::string& to) {
    std::string text = kBaseConfig;
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
  };
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("\"couplings\"", "\"couplingz\"")),
                       "config: top level: unknown key 'couplingz'",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("[0.25, 0.3, 0.3]", "[0.25, -0.3, 0.3]")),
                       "config: couplings: couplings must be non-negative",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("[0.25, 0.3, 0.3]", "[0.25, 0.3]")),
                       "config: couplings: expected an array of three numbers",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("\"thermal\"", "\"coherent\"")),
                       "config: state.kind: expected 'fock' or 'thermal'",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("\"steps\": 3", "\"steps\": 0")),
                       "config: time.steps: must be at least 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("\"steps\": 3", "\"steps\": 2.5")),
                       "config: time.steps: expected an integer", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("\"squeezing\"", "\"squeeze\"")),
                       "config: analyses[0].kind: unknown analysis kind 'squeeze'",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("[[3], [1, 2], [1, 2, 3]]", "[[1, 1]]")),
                       "config: analyses[0].mode_sets[0]: modes must be distinct",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario(mutated("[[3], [1, 2], [1, 2, 3]]", "[[4]]")),
                       "config: analyses[0].mode_sets[0][0]: mode must be 1, 2 or 3",
                       std::invalid_argument);

  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({"couplings": [0, 0, 0],
                         "state": {"kind": "fock", "occupations": [0, 0, 0]},
                         "time": {"start": 0, "end": 1, "steps": 2},
                         "analyses": []})"),
      "config: analyses: expected a non-empty array", std::invalid_argument);

  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({"couplings": [0, 0, 0],
                         "state": {"kind": "fock", "occupations": [0, 0, 0]},
                         "time": {"start": 0, "end": 1, "steps": 2},
                         "analyses": [{"kind": "pnd", "mode": 1, "time": 1, "n_max": 65}]})"),
      "config: analyses[0].n_max: must lie in [0, 64]", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({"couplings": [0, 0, 0],
                         "state": {"kind": "fock", "occupations": [0, 0, 0]},
                         "time": {"start": 0, "end": 1, "steps": 2},
                         "analyses": [{"kind": "wigner-single", "mode": 1, "time": 0,
                                       "points": 1}]})"),
      "config: analyses[0].points: need at least two points per axis",
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({"couplings": [0, 0, 0],
                         "state": {"kind": "fock", "occupations": [0, 0, 0]},
                         "time": {"start": 0, "end": 1, "steps": 2},
                         "analyses": [{"kind": "oracle-check", "cutoff": 41}]})"),
      "config: analyses[0].cutoff: must lie in [1, 40]", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({"couplings": [0, 0, 0],
                         "state": {"kind": "fock", "occupations": [0.5, 0, 0]},
                         "time": {"start": 0, "end": 1, "steps": 2},
                         "analyses": [{"kind": "g2", "modes": [1]}]})"),
      doctest::Contains("config: state.occupations:"), std::invalid_argument);
}

TEST_CASE("scenario echo is canonical and round-trips through the parser") {
  const Scenario sc = parse_scenario(kBaseConfig);
  const std::string echo = scenario_echo(sc);
  const Scenario again = parse_scenario(echo);
  CHECK(scenario_echo(again) == echo);
  CHECK(echo.find("\"couplings\":[0.25,0.3,0.3]") != std::string::npos);
}

TEST_CASE("load_scenario reports unreadable files") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/config.json"), IoError);
}

TEST_CASE("run_scenario writes deterministic squeezing tables") {
  const Scenario sc = parse_scenario(kBaseConfig);
  const fs::path dir_a = fresh_dir("run-a");
  const fs::path dir_b = fresh_dir("run-b");
  const RunResult first = run_scenario(sc, dir_a.string());
  REQUIRE(first.files.size() == 1);
  CHECK(first.files[0] == (dir_a / "squeezing.csv").string());

  const std::string text = read_file(first.files[0]);
  const std::vector<std::string> lines = lines_of(text);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "# triosc 1.0.0");
  CHECK(lines[1].rfind("# config {", 0) == 0);
  CHECK(lines[2] == "t,S_single_mode3,S_two_mode12,S_three_mode,S_reference");
  // Thermal occupations 1: every S factor starts at exactly 2.
  CHECK(lines[3] == "0,2,2,2,2");

  const RunResult second = run_scenario(sc, dir_b.string());
  CHECK(read_file(second.files[0]) == text);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("run_scenario numbers repeated analysis kinds") {
  Scenario sc = parse_scenario(R"({
    "couplings": [0, 0.3, 0.3],
    "state": {"kind": "fock", "occupations": [1, 1, 1]},
    "time": {"start": 0.5, "end": 1, "steps": 2},
    "analyses": [{"kind": "g2", "modes": [1]}, {"kind": "g2", "modes": [3]}]
  })");
  const fs::path dir = fresh_dir("run-named");
  const RunResult result = run_scenario(sc, dir.string());
  REQUIRE(result.files.size() == 2);
  CHECK(result.files[0] == (dir / "g2.csv").string());
  CHECK(result.files[1] == (dir / "g2-2.csv").string());
  fs::remove_all(dir);
}

TEST_CASE("run_scenario removes earlier outputs when an analysis fails") {
  Scenario sc = parse_scenario(R"({
    "couplings": [0.1, 0.1, 0.1],
    "state": {"kind": "thermal", "occupations": [1, 1, 1]},
    "time": {"start": 0, "end": 1, "steps": 2},
    "analyses": [{"kind": "coeffs"}, {"kind": "pnd", "mode": 1, "time": 1}]
  })");
  const fs::path dir = fresh_dir("run-cleanup");
  CHECK_THROWS_WITH_AS(run_scenario(sc, dir.string()),
                       doctest::Contains("analysis 'pnd':"), std::invalid_argument);
  CHECK(!fs::exists(dir / "coeffs.csv"));
  fs::remove_all(dir);
}

TEST_CASE("run_scenario surfaces unwritable output directories as io errors") {
  const fs::path dir = fresh_dir("run-io");
  fs::create_directories(dir);
  std::ofstream(dir / "blocker") << "x";
  Scenario sc = parse_scenario(kBaseConfig);
  CHECK_THROWS_AS(run_scenario(sc, (dir / "blocker" / "sub").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("wigner tables agree with the closed-form evaluator") {
  Scenario sc = parse_scenario(R"({
    "couplings": [0.25, 0.3, 0.3],
    "state": {"kind": "fock", "occupations": [1, 0, 0]},
    "time": {"start": 0, "end": 1, "steps": 2},
    "analyses": [{"kind": "wigner-single", "mode": 1, "time": 0.5,
                  "extent": 1, "points": 3}]
  })");
  const fs::path dir = fresh_dir("run-wigner");
  const RunResult result = run_scenario(sc, dir.string());
  const std::vector<std::string> lines = lines_of(read_file(result.files[0]));
  REQUIRE(lines.size() == 3 + 9);
  CHECK(lines[2] == "x,y,W");
  const ModeCoefficients c = general_coefficients(sc.couplings, 0.5);
  const double w = single_mode_wigner_closed(c, 1, 1, {1.0, 1.0}).value;
  // Last row is the (x, y) = (1, 1) corner; x is the outer loop.
  CHECK(lines.back() == "1,1," + format_double(w));
  fs::remove_all(dir);
}

TEST_CASE("pnd tables carry the tail mass as a comment") {
  Scenario sc = parse_scenario(R"({
    "couplings": [0.3, 0.3, 0.3],
    "state": {"kind": "fock", "occupations": [0, 0, 1]},
    "time": {"start": 0, "end": 1, "steps": 2},
    "analyses": [{"kind": "pnd", "mode": 3, "time": 1, "n_max": 16}]
  })");
  const fs::path dir = fresh_dir("run-pnd");
  const RunResult result = run_scenario(sc, dir.string());
  const std::vector<std::string> lines = lines_of(read_file(result.files[0]));
  CHECK(lines[2].rfind("# tail_mass ", 0) == 0);
  CHECK(lines[3] == "n,P");
  CHECK(lines.size() == 4 + 17);
  fs::remove_all(dir);
}

TEST_CASE("oracle check reports agreement for a converter instance") {
  Scenario sc = parse_scenario(R"({
    "couplings": [0, 0.3, 0.3],
    "state": {"kind": "fock", "occupations": [1, 1, 1]},
    "time": {"start": 1, "end": 1, "steps": 1},
    "analyses": [{"kind": "oracle-check"}]
  })");
  const OracleCheckReport report = oracle_check_report(sc, sc.analyses[0]);
  CHECK(report.skipped.empty());
  REQUIRE(!report.rows.empty());
  for (const OracleCheckRow& row : report.rows) {
    CAPTURE(row.observable);
    CHECK(row.difference <= row.tolerance);
  }
}

TEST_CASE("oracle check skips amplifier instances beyond desk scale") {
  Scenario sc = parse_scenario(R"({
    "couplings": [0.3, 0, 0],
    "state": {"kind": "fock", "occupations": [0, 0, 0]},
    "time": {"start": 6, "end": 6, "steps": 1},
    "analyses": [{"kind": "oracle-check"}]
  })");
  const OracleCheckReport report = oracle_check_report(sc, sc.analyses[0]);
  CHECK(report.rows.empty());
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped[0].find("amplifier growth beyond desk scale") != std::string::npos);
}

TEST_CASE("oracle check skips states the capped basis cannot hold") {
  Scenario sc = parse_scenario(R"({
    "couplings": [0.3, 0, 0],
    "state": {"kind": "fock", "occupations": [0, 0, 0]},
    "time": {"start": 5, "end": 5, "steps": 1},
    "analyses": [{"kind": "oracle-check"}]
  })");
  const OracleCheckReport report = oracle_check_report(sc, sc.analyses[0]);
  CHECK(report.rows.empty());
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped[0].find("tail above limit at the cutoff cap") != std::string::npos);
  // A pinned cutoff is a user request, so the same point fails loudly instead.
  Analysis pinned = sc.analyses[0];
  pinned.cutoff = 20;
  CHECK_THROWS_AS(oracle_check_report(sc, pinned), TruncationError);
}
