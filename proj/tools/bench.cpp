#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "triosc/dynamics.hpp"
#include "triosc/exec.hpp"
#include "triosc/moments.hpp"
#include "triosc/phasespace.hpp"

using namespace triosc;

namespace {

double best_of(int repeats, Exec exec, const ModeCoefficients& c,
               const InitialState& state, int mode, int n_max, Pnd& out) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    out = photon_number_distribution(c, state, mode, n_max, exec);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) set_thread_count(std::atoi(argv[1]));
  std::printf("photon-number distribution, serial versus parallel kernels\n");
  std::printf("%-34s %10s %10s %8s %s\n", "case", "seq [s]", "par [s]", "speedup",
              "identical");

  struct Case {
    const char* name;
    CouplingParams params;
    InitialState state;
    int mode;
    double t;
    int n_max;
  };
  const Case cases[] = {
      {"fock(0,0,1) mode 3 t=8 n_max=40",
       {0.3, 0.3, 0.3},
       {StateKind::fock, {0.0, 0.0, 1.0}},
       3,
       8.0,
       40},
      {"fock(1,0,0) mode 1 t=2 n_max=48",
       {0.25, 0.3, 0.3},
       {StateKind::fock, {1.0, 0.0, 0.0}},
       1,
       2.0,
       48},
      {"fock(0,0,2) mode 3 t=3 n_max=64",
       {0.5, 0.4, 0.4},
       {StateKind::fock, {0.0, 0.0, 2.0}},
       3,
       3.0,
       64},
  };

  for (const Case& c : cases) {
    const ModeCoefficients coeffs = general_coefficients(c.params, c.t);
    Pnd seq, par;
    const double t_seq = best_of(3, Exec::seq, coeffs, c.state, c.mode, c.n_max, seq);
    const double t_par = best_of(3, Exec::par, coeffs, c.state, c.mode, c.n_max, par);
    const bool same = seq.p == par.p && seq.tail_mass == par.tail_mass;
    std::printf("%-34s %10.4f %10.4f %7.2fx %s\n", c.name, t_seq, t_par,
                t_seq / t_par, same ? "yes" : "NO");
    if (!same) return 1;
  }
  return 0;
}
