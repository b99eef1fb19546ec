#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triosc/csv.hpp"
#include "triosc/dynamics.hpp"
#include "triosc/errors.hpp"
#include "triosc/exec.hpp"
#include "triosc/moments.hpp"
#include "triosc/phasespace.hpp"
#include "triosc/scenario.hpp"
#include "triosc/statistics.hpp"
#include "triosc/version.hpp"

namespace {

using namespace triosc;

int do_run(const std::string& config_path, const std::string& out_override, int threads) {
  const Scenario sc = load_scenario(config_path);
  if (threads > 0) set_thread_count(threads);
  const Exec exec = threads == 1 ? Exec::seq : Exec::par;
  const std::string out_dir = out_override.empty() ? sc.output_dir : out_override;
  const RunResult result = run_scenario(sc, out_dir, exec);
  for (const auto& file : result.files) std::cout << "wrote " << file << "\n";
  std::cout << result.files.size() << " file" << (result.files.size() == 1 ? "" : "s")
            << " in " << out_dir << "\n";
  return 0;
}

bool report(const std::string& label, bool ok, const std::string& detail) {
  std::cout << (ok ? "ok   " : "FAIL ") << label << " (" << detail << ")\n";
  return ok;
}

int do_verify() {
  bool all_ok = true;

  {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> coupling(0.0, 1.0);
    std::uniform_real_distribution<double> horizon(0.0, 10.0);
    double worst = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
      const CouplingParams p{coupling(rng), coupling(rng), coupling(rng)};
      worst = std::max(worst, identity_residuals(p, horizon(rng)).max_abs());
    }
    all_ok &= report("coefficient identities, 1000 random draws", worst < 1e-10,
                     "max residual " + format_double(worst));
  }

  {
    double worst = 0.0;
    const double degenerate = std::sqrt(8.0) * 0.15;
    for (double l1 : {0.0, 0.25, 0.6, degenerate}) {
      for (double l : {0.15, 0.3, 0.7}) {
        const CouplingParams p{l1, l, l};
        for (int i = 0; i <= 80; ++i) {
          const double t = 0.25 * i;
          const ModeCoefficients a = special_case_coefficients(p, t);
          const ModeCoefficients b = general_coefficients(p, t);
          for (int j = 0; j < 6; ++j) {
            worst = std::max(worst, std::abs(a.f[j] - b.f[j]));
            worst = std::max(worst, std::abs(a.g[j] - b.g[j]));
            worst = std::max(worst, std::abs(a.h[j] - b.h[j]));
          }
        }
      }
    }
    all_ok &= report("equal-converter closed form vs general path", worst < 1e-9,
                     "max entry difference " + format_double(worst));
  }

  {
    double worst = 0.0;
    const CouplingParams p{0.25, 0.3, 0.3};
    const LadderWord quartic{{1, true}, {1, true}, {1, false}, {1, false}};
    for (double t : {0.5, 2.0}) {
      const ModeCoefficients c = general_coefficients(p, t);
      for (const InitialState& state :
           {InitialState{StateKind::fock, {1.0, 1.0, 1.0}},
            InitialState{StateKind::fock, {2.0, 0.0, 1.0}}}) {
        const double engine = multimode_moment(c, state, quartic).real();
        const double closed = quartic_moment_mode1_closed_form(c, state);
        worst = std::max(worst, std::abs(engine - closed));
        for (int mode : {1, 2, 3}) mean_photon_number(c, state, mode);
      }
    }
    all_ok &= report("word engine vs quadratic and quartic closed forms", worst < 1e-10,
                     "max difference " + format_double(worst));
  }

  {
    Scenario sc;
    sc.couplings = {0.0, 0.1, 0.0};
    sc.state = {StateKind::fock, {1.0, 1.0, 1.0}};
    sc.grid = {5.0, 5.0, 1};
    Analysis converter;
    converter.kind = "oracle-check";
    converter.instances.push_back({{0.0, 0.1, 0.0}, {StateKind::fock, {1.0, 1.0, 1.0}}});
    converter.times = {2.0, 5.0};
    Analysis mixed;
    mixed.kind = "oracle-check";
    mixed.instances.push_back({{0.25, 0.3, 0.3}, {StateKind::fock, {0.0, 0.0, 0.0}}});
    mixed.times = {0.5, 2.0};
    double worst_ratio = 0.0;
    for (const Analysis& a : {converter, mixed}) {
      for (const OracleCheckRow& row : oracle_check_report(sc, a).rows) {
        worst_ratio = std::max(worst_ratio, row.difference / row.tolerance);
      }
    }
    all_ok &= report("truncated-basis reference cross-check", worst_ratio < 1.0,
                     "worst difference at " + format_double(worst_ratio) + " of tolerance");
  }

  {
    const ModeCoefficients c = general_coefficients({0.2, 0.25, 0.3}, 1.5);
    const InitialState state{StateKind::fock, {0.0, 2.0, 0.0}};
    const Pnd seq = photon_number_distribution(c, state, 2, 12, Exec::seq);
    const Pnd par = photon_number_distribution(c, state, 2, 12, Exec::par);
    bool identical = seq.p == par.p && seq.tail_mass == par.tail_mass;
    all_ok &= report("parallel kernels match the serial reference bitwise", identical,
                     identical ? "distributions identical" : "distributions differ");
  }

  if (!all_ok) return 2;
  std::cout << "all checks passed\n";
  return 0;
}

int do_oracle_check(const std::string& config_path) {
  const Scenario sc = load_scenario(config_path);
  bool found = false;
  int checked = 0;
  int failures = 0;
  for (const Analysis& a : sc.analyses) {
    if (a.kind != "oracle-check") continue;
    found = true;
    const OracleCheckReport rep = oracle_check_report(sc, a);
    for (const std::string& skip : rep.skipped) std::cout << "skip " << skip << "\n";
    // One line per instance-time, reporting its worst observable.
    std::map<std::string, const OracleCheckRow*> worst;
    std::map<std::string, double> ratio;
    for (const OracleCheckRow& row : rep.rows) {
      ++checked;
      if (row.difference > row.tolerance) ++failures;
      const std::string key =
          "(" + format_double(row.couplings.lambda1) + "," +
          format_double(row.couplings.lambda2) + "," +
          format_double(row.couplings.lambda3) + ") state (" +
          format_double(row.occupations[0]) + "," + format_double(row.occupations[1]) +
          "," + format_double(row.occupations[2]) + ") t=" + format_double(row.t);
      const double r = row.difference / row.tolerance;
      if (!ratio.count(key) || r > ratio[key]) {
        ratio[key] = r;
        worst[key] = &row;
      }
    }
    for (const auto& [key, row] : worst) {
      std::printf("%s %s: worst %s |difference| %.3g (tolerance %.3g)\n",
                  row->difference > row->tolerance ? "FAIL" : "ok  ", key.c_str(),
                  row->observable.c_str(), row->difference, row->tolerance);
    }
  }
  if (!found) {
    throw std::invalid_argument("config has no oracle-check analysis");
  }
  std::cout << checked << " observables checked, " << failures << " outside tolerance\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + " " + kVersion +
               " - three parametrically coupled bosonic modes: squeezing, photon "
               "statistics and phase-space distributions"};
  app.footer("Exit codes: 0 success, 1 validation error, 2 numerical-tolerance "
             "failure, 3 I/O error.\n"
             "TRIOSC_SEED is reserved for future randomized features; it is read by "
             "nothing today.");
  app.require_subcommand(1);

  std::string run_config, run_out;
  int run_threads = 0;
  CLI::App* run = app.add_subcommand("run", "run a scenario and write one CSV per analysis");
  run->add_option("config", run_config, "scenario JSON file")->required();
  run->add_option("--out", run_out, "output directory (overrides the config's)");
  run->add_option("--threads", run_threads, "worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant suite");

  std::string oc_config;
  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "compare the engine against the truncated-basis reference");
  oracle->add_option("config", oc_config, "scenario JSON file with an oracle-check analysis")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return do_run(run_config, run_out, run_threads);
    if (verify->parsed()) return do_verify();
    return do_oracle_check(oc_config);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
