#include "triosc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

#include "triosc/csv.hpp"
#include "triosc/errors.hpp"
#include "triosc/oracle.hpp"
#include "triosc/phasespace.hpp"
#include "triosc/statistics.hpp"
#include "triosc/version.hpp"

namespace triosc {

namespace {

using nlohmann::json;

constexpr double kAmplifierTimeCap = 1.5;  // largest lambda1 * t the reference takes

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw std::invalid_argument("config: " + path + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(path, "unknown key '" + item.key() + "'");
  }
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing required key '" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::array<double, 3> as_triple(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected an array of three numbers");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = as_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

int as_mode(const json& v, const std::string& path) {
  const int m = as_int(v, path);
  if (m < 1 || m > 3) fail(path, "mode must be 1, 2 or 3");
  return m;
}

CouplingParams parse_couplings(const json& v, const std::string& path) {
  const auto triple = as_triple(v, path);
  CouplingParams p{triple[0], triple[1], triple[2]};
  for (double l : triple) {
    if (l < 0.0) fail(path, "couplings must be non-negative");
  }
  return p;
}

InitialState parse_state(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  check_keys(v, path, {"kind", "occupations"});
  const json& kind = require(v, path, "kind");
  if (!kind.is_string()) fail(path + ".kind", "expected a string");
  InitialState state;
  const std::string name = kind.get<std::string>();
  if (name == "fock") {
    state.kind = StateKind::fock;
  } else if (name == "thermal") {
    state.kind = StateKind::thermal;
  } else {
    fail(path + ".kind", "expected 'fock' or 'thermal'");
  }
  state.occupations = as_triple(require(v, path, "occupations"), path + ".occupations");
  try {
    state.validate();
  } catch (const std::exception& e) {
    fail(path + ".occupations", e.what());
  }
  return state;
}

std::vector<std::pair<int, int>> parse_pairs(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of [j, k] pairs");
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    const json& pair = v[i];
    if (!pair.is_array() || pair.size() != 2) fail(at, "expected a [j, k] pair");
    const int j = as_mode(pair[0], at + "[0]");
    const int k = as_mode(pair[1], at + "[1]");
    if (j == k) fail(at, "pair modes must differ");
    out.emplace_back(j, k);
  }
  return out;
}

Analysis parse_analysis(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  const json& kind = require(v, path, "kind");
  if (!kind.is_string()) fail(path + ".kind", "expected a string");
  Analysis a;
  a.kind = kind.get<std::string>();
  if (a.kind == "coeffs") {
    check_keys(v, path, {"kind", "residuals"});
    if (v.contains("residuals")) a.residuals = as_bool(v["residuals"], path + ".residuals");
  } else if (a.kind == "squeezing") {
    check_keys(v, path, {"kind", "mode_sets", "reference"});
    const json& sets = require(v, path, "mode_sets");
    if (!sets.is_array() || sets.empty()) {
      fail(path + ".mode_sets", "expected a non-empty array of mode lists");
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const std::string at = path + ".mode_sets[" + std::to_string(i) + "]";
      const json& set = sets[i];
      if (!set.is_array() || set.empty() || set.size() > 3) {
        fail(at, "expected one to three modes");
      }
      std::vector<int> modes;
      for (std::size_t j = 0; j < set.size(); ++j) {
        modes.push_back(as_mode(set[j], at + "[" + std::to_string(j) + "]"));
      }
      std::vector<int> sorted = modes;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        fail(at, "modes must be distinct");
      }
      a.mode_sets.push_back(modes);
    }
    if (v.contains("reference")) a.reference = as_bool(v["reference"], path + ".reference");
  } else if (a.kind == "sum-squeezing" || a.kind == "cauchy-schwarz") {
    check_keys(v, path, {"kind", "pairs"});
    a.pairs = parse_pairs(require(v, path, "pairs"), path + ".pairs");
  } else if (a.kind == "g2") {
    check_keys(v, path, {"kind", "modes"});
    const json& modes = require(v, path, "modes");
    if (!modes.is_array() || modes.empty()) {
      fail(path + ".modes", "expected a non-empty array of modes");
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
      a.modes.push_back(as_mode(modes[i], path + ".modes[" + std::to_string(i) + "]"));
    }
  } else if (a.kind == "wigner-single") {
    check_keys(v, path, {"kind", "mode", "time", "extent", "points"});
    a.mode = as_mode(require(v, path, "mode"), path + ".mode");
    a.time = as_number(require(v, path, "time"), path + ".time");
    if (v.contains("extent")) a.extent = as_number(v["extent"], path + ".extent");
    if (v.contains("points")) a.points = as_int(v["points"], path + ".points");
  } else if (a.kind == "wigner-joint") {
    check_keys(v, path, {"kind", "time", "vary", "extent", "points"});
    a.time = as_number(require(v, path, "time"), path + ".time");
    if (v.contains("vary")) {
      const json& vary = v["vary"];
      if (!vary.is_array() || vary.size() != 2) {
        fail(path + ".vary", "expected two distinct modes");
      }
      a.vary[0] = as_mode(vary[0], path + ".vary[0]");
      a.vary[1] = as_mode(vary[1], path + ".vary[1]");
      if (a.vary[0] == a.vary[1]) fail(path + ".vary", "modes must be distinct");
    }
    if (v.contains("extent")) a.extent = as_number(v["extent"], path + ".extent");
    if (v.contains("points")) a.points = as_int(v["points"], path + ".points");
  } else if (a.kind == "pnd") {
    check_keys(v, path, {"kind", "mode", "time", "n_max"});
    a.mode = as_mode(require(v, path, "mode"), path + ".mode");
    a.time = as_number(require(v, path, "time"), path + ".time");
    if (v.contains("n_max")) a.n_max = as_int(v["n_max"], path + ".n_max");
  } else if (a.kind == "oracle-check") {
    check_keys(v, path, {"kind", "times", "cutoff", "instances"});
    if (v.contains("times")) {
      const json& times = v["times"];
      if (!times.is_array() || times.empty()) {
        fail(path + ".times", "expected a non-empty array of times");
      }
      for (std::size_t i = 0; i < times.size(); ++i) {
        a.times.push_back(as_number(times[i], path + ".times[" + std::to_string(i) + "]"));
      }
    }
    if (v.contains("cutoff")) {
      const int n = as_int(v["cutoff"], path + ".cutoff");
      if (n < 1 || n > kMaxCutoff) fail(path + ".cutoff", "must lie in [1, 40]");
      a.cutoff = n;
    }
    if (v.contains("instances")) {
      const json& list = v["instances"];
      if (!list.is_array() || list.empty()) {
        fail(path + ".instances", "expected a non-empty array");
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string at = path + ".instances[" + std::to_string(i) + "]";
        const json& inst = list[i];
        if (!inst.is_object()) fail(at, "expected an object");
        check_keys(inst, at, {"couplings", "state"});
        OracleInstance oi;
        oi.couplings = parse_couplings(require(inst, at, "couplings"), at + ".couplings");
        oi.state = parse_state(require(inst, at, "state"), at + ".state");
        a.instances.push_back(oi);
      }
    }
  } else {
    fail(path + ".kind", "unknown analysis kind '" + a.kind + "'");
  }
  if (a.points < 2 && (a.kind == "wigner-single" || a.kind == "wigner-joint")) {
    fail(path + ".points", "need at least two points per axis");
  }
  if (a.extent <= 0.0) fail(path + ".extent", "must be positive");
  if (a.kind == "pnd" && (a.n_max < 0 || a.n_max > 64)) {
    fail(path + ".n_max", "must lie in [0, 64]");
  }
  return a;
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  std::vector<double> out;
  out.reserve(steps);
  if (steps == 1) {
    out.push_back(t_start);
    return out;
  }
  const double dt = (t_end - t_start) / (steps - 1);
  for (int i = 0; i < steps; ++i) out.push_back(t_start + dt * i);
  return out;
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
  check_keys(root, "top level", {"couplings", "state", "time", "analyses", "output"});
  Scenario sc;
  sc.couplings = parse_couplings(require(root, "top level", "couplings"), "couplings");
  sc.state = parse_state(require(root, "top level", "state"), "state");
  const json& time = require(root, "top level", "time");
  if (!time.is_object()) fail("time", "expected an object");
  check_keys(time, "time", {"start", "end", "steps"});
  sc.grid.t_start = as_number(require(time, "time", "start"), "time.start");
  sc.grid.t_end = as_number(require(time, "time", "end"), "time.end");
  sc.grid.steps = as_int(require(time, "time", "steps"), "time.steps");
  if (sc.grid.steps < 1) fail("time.steps", "must be at least 1");
  if (root.contains("output")) {
    const json& out = root["output"];
    if (!out.is_string()) fail("output", "expected a string");
    sc.output_dir = out.get<std::string>();
    if (sc.output_dir.empty()) fail("output", "must not be empty");
  }
  const json& analyses = require(root, "top level", "analyses");
  if (!analyses.is_array() || analyses.empty()) {
    throw std::invalid_argument("config: analyses: expected a non-empty array");
  }
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    sc.analyses.push_back(
        parse_analysis(analyses[i], "analyses[" + std::to_string(i) + "]"));
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read of " + path + " failed");
  return parse_scenario(buffer.str());
}

namespace {

json state_json(const InitialState& state) {
  return {{"kind", state.kind == StateKind::fock ? "fock" : "thermal"},
          {"occupations", state.occupations}};
}

json couplings_json(const CouplingParams& p) {
  return json::array({p.lambda1, p.lambda2, p.lambda3});
}

json analysis_json(const Analysis& a) {
  json v{{"kind", a.kind}};
  if (a.kind == "coeffs") {
    v["residuals"] = a.residuals;
  } else if (a.kind == "squeezing") {
    v["mode_sets"] = a.mode_sets;
    v["reference"] = a.reference;
  } else if (a.kind == "sum-squeezing" || a.kind == "cauchy-schwarz") {
    json pairs = json::array();
    for (const auto& [j, k] : a.pairs) pairs.push_back({j, k});
    v["pairs"] = pairs;
  } else if (a.kind == "g2") {
    v["modes"] = a.modes;
  } else if (a.kind == "wigner-single") {
    v["mode"] = a.mode;
    v["time"] = a.time;
    v["extent"] = a.extent;
    v["points"] = a.points;
  } else if (a.kind == "wigner-joint") {
    v["vary"] = a.vary;
    v["time"] = a.time;
    v["extent"] = a.extent;
    v["points"] = a.points;
  } else if (a.kind == "pnd") {
    v["mode"] = a.mode;
    v["time"] = a.time;
    v["n_max"] = a.n_max;
  } else if (a.kind == "oracle-check") {
    if (!a.times.empty()) v["times"] = a.times;
    if (a.cutoff) v["cutoff"] = *a.cutoff;
    if (!a.instances.empty()) {
      json list = json::array();
      for (const auto& inst : a.instances) {
        list.push_back({{"couplings", couplings_json(inst.couplings)},
                        {"state", state_json(inst.state)}});
      }
      v["instances"] = list;
    }
  }
  return v;
}

}  // namespace

std::string scenario_echo(const Scenario& sc) {
  json root{{"couplings", couplings_json(sc.couplings)},
            {"state", state_json(sc.state)},
            {"time",
             {{"start", sc.grid.t_start}, {"end", sc.grid.t_end}, {"steps", sc.grid.steps}}},
            {"output", sc.output_dir}};
  json analyses = json::array();
  for (const auto& a : sc.analyses) analyses.push_back(analysis_json(a));
  root["analyses"] = analyses;
  return root.dump();
}

namespace {

std::string digits(const std::vector<int>& modes) {
  std::string out;
  for (int m : modes) out += std::to_string(m);
  return out;
}

std::string set_column(const std::vector<int>& set) {
  if (set.size() == 1) return "S_single_mode" + digits(set);
  if (set.size() == 2) return "S_two_mode" + digits(set);
  return "S_three_mode";
}

CsvTable coeffs_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"t"};
  for (const char* block : {"f", "g", "h"}) {
    for (int i = 1; i <= 6; ++i) t.header.push_back(block + std::to_string(i));
  }
  if (a.residuals) {
    for (const auto& name : IdentityReport::names()) t.header.push_back(name);
  }
  for (double time : sc.grid.times()) {
    const ModeCoefficients c = general_coefficients(sc.couplings, time);
    std::vector<std::string> row{format_double(time)};
    for (const auto* block : {&c.f, &c.g, &c.h}) {
      for (double v : *block) row.push_back(format_double(v));
    }
    if (a.residuals) {
      for (double v : verify_identities(c).values()) row.push_back(format_double(v));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable squeezing_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"t"};
  for (const auto& set : a.mode_sets) t.header.push_back(set_column(set));
  if (a.reference) t.header.push_back("S_reference");
  const double occ_mean = (sc.state.occupations[0] + sc.state.occupations[1] +
                           sc.state.occupations[2]) / 3.0;
  for (double time : sc.grid.times()) {
    const ModeCoefficients c = general_coefficients(sc.couplings, time);
    std::vector<std::string> row{format_double(time)};
    for (const auto& set : a.mode_sets) {
      row.push_back(format_double(quadrature_squeezing(c, sc.state, set).S));
    }
    if (a.reference) {
      const double ref =
          (1.0 + 2.0 * occ_mean) * std::exp(-sc.couplings.lambda1 * time) - 1.0;
      row.push_back(format_double(ref));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable sum_squeezing_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"t"};
  for (const auto& [j, k] : a.pairs) {
    const std::string jk = std::to_string(j) + std::to_string(k);
    t.header.push_back("S_sum_" + jk);
    t.header.push_back("Q_sum_" + jk);
  }
  for (double time : sc.grid.times()) {
    const ModeCoefficients c = general_coefficients(sc.couplings, time);
    std::vector<std::string> row{format_double(time)};
    for (const auto& [j, k] : a.pairs) {
      const SqueezingReport r = sum_squeezing(c, sc.state, j, k);
      row.push_back(format_double(r.S));
      row.push_back(format_double(r.Q));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable g2_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"t"};
  for (int mode : a.modes) t.header.push_back("g2_" + std::to_string(mode));
  for (double time : sc.grid.times()) {
    const ModeCoefficients c = general_coefficients(sc.couplings, time);
    std::vector<std::string> row{format_double(time)};
    for (int mode : a.modes) row.push_back(format_double(g2(c, sc.state, mode)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable cauchy_schwarz_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"t"};
  for (const auto& [j, k] : a.pairs) {
    t.header.push_back("I_" + std::to_string(j) + std::to_string(k));
  }
  for (double time : sc.grid.times()) {
    const ModeCoefficients c = general_coefficients(sc.couplings, time);
    std::vector<std::string> row{format_double(time)};
    for (const auto& [j, k] : a.pairs) {
      row.push_back(format_double(cauchy_schwarz_factor(c, sc.state, j, k)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> axis(double extent, int points) {
  std::vector<double> out;
  out.reserve(points);
  const double step = 2.0 * extent / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(-extent + step * i);
  return out;
}

bool spectators_vacuum(const InitialState& state, int mode) {
  if (state.kind != StateKind::fock) return false;
  for (int j = 1; j <= 3; ++j) {
    if (j != mode && state.occupations[j - 1] != 0.0) return false;
  }
  return true;
}

CsvTable wigner_single_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"x", "y", "W"};
  const ModeCoefficients c = general_coefficients(sc.couplings, a.time);
  const std::vector<double> grid = axis(a.extent, a.points);
  const bool closed_ok = spectators_vacuum(sc.state, a.mode);
  const int n = static_cast<int>(sc.state.occupations[a.mode - 1]);
  for (double x : grid) {
    for (double y : grid) {
      const std::complex<double> alpha{x, y};
      const double w = closed_ok
                           ? single_mode_wigner_closed(c, a.mode, n, alpha).value
                           : single_mode_wigner_numeric(c, sc.state, a.mode, alpha);
      t.rows.push_back({format_double(x), format_double(y), format_double(w)});
    }
  }
  return t;
}

CsvTable wigner_joint_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"x", "y", "W"};
  const ModeCoefficients c = general_coefficients(sc.couplings, a.time);
  const std::vector<double> grid = axis(a.extent, a.points);
  for (double x : grid) {
    for (double y : grid) {
      PhasePoint alphas{};
      alphas[a.vary[0] - 1] = {x, 0.0};
      alphas[a.vary[1] - 1] = {y, 0.0};
      const double w = joint_wigner(c, sc.state, alphas);
      t.rows.push_back({format_double(x), format_double(y), format_double(w)});
    }
  }
  return t;
}

CsvTable pnd_table(const Scenario& sc, const Analysis& a, Exec exec) {
  CsvTable t;
  t.header = {"n", "P"};
  const ModeCoefficients c = general_coefficients(sc.couplings, a.time);
  const Pnd pnd = photon_number_distribution(c, sc.state, a.mode, a.n_max, exec);
  t.comments.push_back("tail_mass " + format_double(pnd.tail_mass));
  for (std::size_t n = 0; n < pnd.p.size(); ++n) {
    t.rows.push_back({std::to_string(n), format_double(pnd.p[n])});
  }
  return t;
}

CsvTable oracle_check_table(const Scenario& sc, const Analysis& a) {
  CsvTable t;
  t.header = {"lambda1", "lambda2", "lambda3", "n1",         "n2",
              "n3",      "t",       "observable", "engine",  "reference",
              "difference", "tolerance"};
  int failures = 0;
  std::string first_failure;
  const OracleCheckReport report = oracle_check_report(sc, a);
  for (const std::string& skip : report.skipped) t.comments.push_back("skipped " + skip);
  for (const OracleCheckRow& row : report.rows) {
    t.rows.push_back({format_double(row.couplings.lambda1),
                      format_double(row.couplings.lambda2),
                      format_double(row.couplings.lambda3),
                      format_double(row.occupations[0]),
                      format_double(row.occupations[1]),
                      format_double(row.occupations[2]), format_double(row.t),
                      row.observable, format_double(row.engine),
                      format_double(row.reference), format_double(row.difference),
                      format_double(row.tolerance)});
    if (row.difference > row.tolerance) {
      ++failures;
      if (first_failure.empty()) {
        first_failure = row.observable + " at t=" + format_double(row.t) +
                        " differs by " + format_double(row.difference) +
                        " (tolerance " + format_double(row.tolerance) + ")";
      }
    }
  }
  if (failures > 0) {
    throw OracleMismatchError(std::to_string(failures) +
                              " observables outside tolerance; first: " + first_failure);
  }
  return t;
}

}  // namespace

OracleCheckReport oracle_check_report(const Scenario& sc, const Analysis& a) {
  std::vector<OracleInstance> instances = a.instances;
  if (instances.empty()) instances.push_back({sc.couplings, sc.state});
  std::vector<double> times = a.times.empty() ? sc.grid.times() : a.times;
  OracleCheckReport report;
  std::vector<OracleCheckRow>& rows = report.rows;
  for (const OracleInstance& inst : instances) {
    for (double time : times) {
      const std::string point =
          "(" + format_double(inst.couplings.lambda1) + "," +
          format_double(inst.couplings.lambda2) + "," +
          format_double(inst.couplings.lambda3) + ") state (" +
          format_double(inst.state.occupations[0]) + "," +
          format_double(inst.state.occupations[1]) + "," +
          format_double(inst.state.occupations[2]) + ") t=" + format_double(time);
      if (inst.couplings.lambda1 > 0.0 &&
          inst.couplings.lambda1 * time > kAmplifierTimeCap) {
        report.skipped.push_back(point + ": amplifier growth beyond desk scale");
        continue;
      }
      const ModeCoefficients coeffs = general_coefficients(inst.couplings, time);
      TruncatedState evolved;
      if (a.cutoff) {
        // An explicit cutoff is a user request; too-small cutoffs fail loudly.
        evolved = evolve(make_state(inst.state, *a.cutoff),
                         build_generator(inst.couplings, *a.cutoff), time);
      } else {
        try {
          evolved = evolve_auto(inst.couplings, inst.state, time);
        } catch (const TruncationError&) {
          report.skipped.push_back(point + ": tail above limit at the cutoff cap");
          continue;
        }
      }
      const double tail = evolved.tail_population();
      const MomentFn reference = oracle_moment_function(evolved);
      const auto push = [&](const std::string& name, double engine, double ref) {
        OracleCheckRow row;
        row.couplings = inst.couplings;
        row.occupations = inst.state.occupations;
        row.t = time;
        row.observable = name;
        row.engine = engine;
        row.reference = ref;
        row.difference = std::abs(engine - ref);
        row.tolerance = std::max(1e-6, 10.0 * tail) * std::max(1.0, std::abs(ref));
        rows.push_back(std::move(row));
      };
      for (int mode : {1, 2, 3}) {
        const LadderWord count{{mode, true}, {mode, false}};
        push("mean_n" + std::to_string(mode),
             mean_photon_number(coeffs, inst.state, mode), reference(count).real());
      }
      const std::vector<std::vector<int>> sets{{1}, {2}, {3}, {1, 2}, {1, 2, 3}};
      for (const auto& set : sets) {
        const SqueezingReport engine = quadrature_squeezing(coeffs, inst.state, set);
        const SqueezingReport oracle = quadrature_squeezing_core(reference, set);
        push("varX_" + digits(set), engine.var_x, oracle.var_x);
        push("varY_" + digits(set), engine.var_y, oracle.var_y);
      }
      const std::vector<std::pair<int, int>> pairs{{1, 2}, {1, 3}, {2, 3}};
      for (const auto& [j, k] : pairs) {
        const std::string jk = std::to_string(j) + std::to_string(k);
        const SqueezingReport engine = sum_squeezing(coeffs, inst.state, j, k);
        const SqueezingReport oracle = sum_squeezing_core(reference, j, k);
        push("varX_sum_" + jk, engine.var_x, oracle.var_x);
        push("varY_sum_" + jk, engine.var_y, oracle.var_y);
      }
      for (int mode : {1, 2, 3}) {
        if (mean_photon_number(coeffs, inst.state, mode) <= 1e-9) continue;
        push("g2_" + std::to_string(mode), g2(coeffs, inst.state, mode),
             g2_core(reference, mode));
      }
      for (const auto& [j, k] : pairs) {
        const LadderWord cross{{j, true}, {j, false}, {k, true}, {k, false}};
        if (multimode_moment(coeffs, inst.state, cross).real() <= 1e-9) continue;
        push("I_" + std::to_string(j) + std::to_string(k),
             cauchy_schwarz_factor(coeffs, inst.state, j, k),
             cauchy_schwarz_core(reference, j, k));
      }
    }
  }
  return report;
}

RunResult run_scenario(const Scenario& sc, const std::string& out_dir, Exec exec) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  RunResult result;
  const auto cleanup = [&result]() {
    for (const auto& path : result.files) {
      std::error_code ignore;
      fs::remove(path, ignore);
    }
  };

  std::map<std::string, int> kind_counts;
  for (const Analysis& a : sc.analyses) {
    const int count = ++kind_counts[a.kind];
    std::string name = a.kind;
    if (count > 1) name += "-" + std::to_string(count);
    const std::string path = (fs::path(out_dir) / (name + ".csv")).string();
    try {
      CsvTable table;
      if (a.kind == "coeffs") {
        table = coeffs_table(sc, a);
      } else if (a.kind == "squeezing") {
        table = squeezing_table(sc, a);
      } else if (a.kind == "sum-squeezing") {
        table = sum_squeezing_table(sc, a);
      } else if (a.kind == "g2") {
        table = g2_table(sc, a);
      } else if (a.kind == "cauchy-schwarz") {
        table = cauchy_schwarz_table(sc, a);
      } else if (a.kind == "wigner-single") {
        table = wigner_single_table(sc, a);
      } else if (a.kind == "wigner-joint") {
        table = wigner_joint_table(sc, a);
      } else if (a.kind == "pnd") {
        table = pnd_table(sc, a, exec);
      } else {
        table = oracle_check_table(sc, a);
      }
      table.comments.insert(table.comments.begin(),
                            {std::string(kToolName) + " " + kVersion,
                             "config " + scenario_echo(sc)});
      write_csv(path, table);
      result.files.push_back(path);
    } catch (const TruncationError& e) {
      cleanup();
      throw TruncationError("analysis '" + name + "': " + e.what(), e.suggested());
    } catch (const QuadratureError& e) {
      cleanup();
      throw QuadratureError("analysis '" + name + "': " + e.what(), e.error_estimate());
    } catch (const OracleMismatchError& e) {
      cleanup();
      throw OracleMismatchError("analysis '" + name + "': " + std::string(e.what()));
    } catch (const IoError& e) {
      cleanup();
      throw IoError("analysis '" + name + "': " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
      cleanup();
      throw std::invalid_argument("analysis '" + name + "': " + std::string(e.what()));
    } catch (const std::exception& e) {
      cleanup();
      throw std::runtime_error("analysis '" + name + "': " + std::string(e.what()));
    }
  }
  return result;
}

}  // namespace triosc
