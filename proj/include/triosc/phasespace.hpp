#pragma once

#include <array>
#include <complex>
#include <vector>

#include "triosc/dynamics.hpp"
#include "triosc/exec.hpp"
#include "triosc/moments.hpp"

namespace triosc {

// Generalized Laguerre L_n^order(x) by forward recurrence; n <= 512.
double laguerre(int n, double order, double x);
// All of L_0^order(x) .. L_n^order(x) in one recurrence pass.
std::vector<double> laguerre_row(int n, double order, double x);

// One phase-space argument per mode.
using PhasePoint = std::array<std::complex<double>, 3>;

// The linear map shared by the characteristic function (eta) and the Wigner
// arguments (epsilon): out_k = sum_j (zeta_j c_jk - zeta_j^* d_jk).
PhasePoint transformed_arguments(const ModeCoefficients& coeffs, const PhasePoint& zetas);

// s-ordered characteristic function for a product Fock initial state;
// s in {1, 0, -1} for normal, symmetric, antinormal ordering.
std::complex<double> characteristic_function(const ModeCoefficients& coeffs,
                                             const InitialState& state,
                                             const PhasePoint& zetas, int s = 0);

// Closed-form joint Wigner function for a product Fock initial state.
double joint_wigner(const ModeCoefficients& coeffs, const InitialState& state,
                    const PhasePoint& alphas);

enum class WignerMethod { closed_form, quadrature };

struct WignerValue {
  double value = 0.0;
  WignerMethod method = WignerMethod::closed_form;
};

// Intermediates of the closed single-mode form, as printed: the quotient
// arguments z1, z2 are 0/0 on the degeneracy surface delta == 0 and are
// reported as computed (possibly non-finite) for diagnostics.
struct WignerAux {
  double a_plus = 0.0, a_minus = 0.0;
  double b_plus = 0.0, b_minus = 0.0;
  double c_plus = 0.0, c_minus = 0.0;
  double d_plus = 0.0, d_minus = 0.0;
  double h_plus = 0.0, h_minus = 0.0;
  double z1 = 0.0, z2 = 0.0;
  double delta = 0.0;  // a_plus*b_minus - a_minus*b_plus (capital A,B)
};

WignerAux wigner_closed_aux(const ModeCoefficients& coeffs, int mode,
                            std::complex<double> alpha);

// Closed-form single-mode Wigner for the selected mode in |n> with the other
// modes in vacuum, evaluated through cancellation-free equivalents of the
// printed quotients; finite and exact on the degeneracy surface, t=0 included.
double wigner_closed_formula(const ModeCoefficients& coeffs, int mode, int n,
                             std::complex<double> alpha);

// The same closed form behind the published degeneracy contract: within
// |delta| < 1e-8 of the degenerate surface it falls back to quadrature and
// tags the result.
WignerValue single_mode_wigner_closed(const ModeCoefficients& coeffs, int mode, int n,
                                      std::complex<double> alpha);

// Single-mode Wigner by 2-D quadrature of the characteristic function;
// supports arbitrary product Fock occupations. Absolute target 1e-6.
double single_mode_wigner_numeric(const ModeCoefficients& coeffs, const InitialState& state,
                                  int mode, std::complex<double> alpha);

// s = 0 Wigner or s = -1 Husimi through the same quadrature.
double single_mode_quasiprobability_numeric(const ModeCoefficients& coeffs,
                                            const InitialState& state, int mode,
                                            std::complex<double> alpha, int s);

struct Pnd {
  std::vector<double> p;  // P(0) .. P(n_max)
  double tail_mass = 0.0;
};

// Photon-number distribution of one mode from the Wigner function against the
// Laguerre kernel; n_max <= 64. Throws TruncationError when the captured
// probability misses 1 by more than 1e-3.
Pnd photon_number_distribution(const ModeCoefficients& coeffs, const InitialState& state,
                               int mode, int n_max, Exec exec = Exec::seq);

}  // namespace triosc
