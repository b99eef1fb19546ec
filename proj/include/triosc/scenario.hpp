#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "triosc/dynamics.hpp"
#include "triosc/exec.hpp"
#include "triosc/moments.hpp"

namespace triosc {

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int steps = 1;

  // Inclusive linear grid; a single step collapses to t_start.
  std::vector<double> times() const;
};

struct OracleInstance {
  CouplingParams couplings;
  InitialState state;
};

// One requested computation. `kind` selects which option fields apply; the
// parser rejects options that do not belong to the kind.
struct Analysis {
  std::string kind;
  bool residuals = false;                      // coeffs
  std::vector<std::vector<int>> mode_sets;     // squeezing
  bool reference = false;                      // squeezing
  std::vector<std::pair<int, int>> pairs;      // sum-squeezing, cauchy-schwarz
  std::vector<int> modes;                      // g2
  int mode = 0;                                // wigner-single, pnd
  double time = 0.0;                           // wigner-single, wigner-joint, pnd
  double extent = 3.0;                         // wigner grids, half-width
  int points = 41;                             // wigner grids, nodes per axis
  std::array<int, 2> vary{1, 2};               // wigner-joint slice axes
  int n_max = 32;                              // pnd
  std::optional<int> cutoff;                   // oracle-check
  std::vector<double> times;                   // oracle-check, defaults to the grid
  std::vector<OracleInstance> instances;       // oracle-check, defaults to scenario
};

struct Scenario {
  CouplingParams couplings;
  InitialState state;
  TimeGrid grid;
  std::vector<Analysis> analyses;
  std::string output_dir = "out";
};

// Strict parse: unknown keys, wrong types, and out-of-range values raise
// std::invalid_argument naming the offending field path.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Canonical one-line echo of the parsed scenario, embedded in every output.
std::string scenario_echo(const Scenario& scenario);

// One engine-versus-reference comparison, tolerance already scaled by the
// truncation tail and the reference magnitude.
struct OracleCheckRow {
  CouplingParams couplings;
  std::array<double, 3> occupations{};
  double t = 0.0;
  std::string observable;
  double engine = 0.0;
  double reference = 0.0;
  double difference = 0.0;
  double tolerance = 0.0;
};

// Full comparison set for an oracle-check analysis. Instance-times the
// truncated reference cannot represent produce a skip entry, not rows:
// amplifier instances with lambda1 * t beyond the truncation-friendly range,
// and states whose tail stays above the output limit at the cutoff cap.
struct OracleCheckReport {
  std::vector<OracleCheckRow> rows;
  std::vector<std::string> skipped;
};

OracleCheckReport oracle_check_report(const Scenario& scenario,
                                      const Analysis& analysis);

struct RunResult {
  std::vector<std::string> files;
};

// Runs every analysis and writes one CSV per analysis into out_dir. On any
// failure all files written by this run are removed and the error is rethrown
// with the analysis named.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir,
                       Exec exec = Exec::seq);

}  // namespace triosc
