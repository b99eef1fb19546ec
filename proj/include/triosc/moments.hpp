#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "triosc/dynamics.hpp"

namespace triosc {

enum class StateKind { fock, thermal };

// Product initial state: each mode is a Fock state |n> or a thermal mixture
// with mean occupation n-bar.
struct InitialState {
  StateKind kind = StateKind::fock;
  std::array<double, 3> occupations{};

  // Requires finite, non-negative occupations; integers for Fock states.
  void validate() const;
};

// One evolved ladder operator in a product: mode in {1,2,3}.
struct Letter {
  int mode = 1;
  bool dagger = false;
};

using LadderWord = std::vector<Letter>;

inline constexpr int kMaxWordLength = 8;

// Expectation of an operator word in some fixed state; the engine below and
// the truncated-basis reference both provide this shape.
using MomentFn = std::function<std::complex<double>(const LadderWord&)>;

// <a^dag^r a^r> in a single-mode Fock or thermal state.
double single_mode_expectation(int daggers, StateKind kind, double occupation);

// Expectation of a product of evolved ladder operators, left to right, in the
// given product initial state. Real for real coefficients; the imaginary part
// is identically zero by construction.
std::complex<double> multimode_moment(const ModeCoefficients& coeffs,
                                      const InitialState& state, const LadderWord& word);

MomentFn moment_function(const ModeCoefficients& coeffs, const InitialState& state);

// <A_mode^dag A_mode> via the word engine, cross-checked internally against
// the quadratic closed form; disagreement indicates a coefficient bug.
double mean_photon_number(const ModeCoefficients& coeffs, const InitialState& state,
                          int mode);

// Quadratic closed form for the mean photon number of the given mode.
double mean_photon_closed_form(const ModeCoefficients& coeffs, const InitialState& state,
                               int mode);

// Quartic closed form <A1^dag^2 A1^2> for Fock initial states.
double quartic_moment_mode1_closed_form(const ModeCoefficients& coeffs,
                                        const InitialState& state);

}  // namespace triosc
