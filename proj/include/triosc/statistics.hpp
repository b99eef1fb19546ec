#pragma once

#include <utility>
#include <vector>

#include "triosc/moments.hpp"

namespace triosc {

// Quadrature or sum-quadrature variances with their uncertainty bound.
// S and Q are the fractional deviations of var_x and var_y from the bound;
// negative values indicate squeezing.
struct SqueezingReport {
  std::vector<int> modes;
  double var_x = 0.0;
  double var_y = 0.0;
  double bound = 0.0;
  double S = 0.0;
  double Q = 0.0;
};

// Variances of X = (A_S + A_S^dag)/2 and Y = (A_S - A_S^dag)/2i for the sum
// A_S over the given modes (one to three distinct modes). Bound is m/4.
SqueezingReport quadrature_squeezing(const ModeCoefficients& coeffs,
                                     const InitialState& state,
                                     const std::vector<int>& modes);
SqueezingReport quadrature_squeezing_core(const MomentFn& moment,
                                          const std::vector<int>& modes);

// Closed quadratic form for the same variances; used as an independent check
// of the word-engine path.
std::pair<double, double> quadrature_variance_closed_form(const ModeCoefficients& coeffs,
                                                          const InitialState& state,
                                                          const std::vector<int>& modes);

// Third-mode quadrature variances in the equal-converter case.
std::pair<double, double> third_mode_variance_closed_form(const CouplingParams& p,
                                                          const InitialState& state,
                                                          double t);

// Variances of X = (A_j A_k + h.c.)/2 and Y = (A_j A_k - h.c.)/2i around
// their means; bound is (<n_j> + <n_k> + 1)/4.
SqueezingReport sum_squeezing(const ModeCoefficients& coeffs, const InitialState& state,
                              int mode_j, int mode_k);
SqueezingReport sum_squeezing_core(const MomentFn& moment, int mode_j, int mode_k);

// Second-order coherence <A^dag^2 A^2> / <A^dag A>^2 of one mode. Throws
// std::domain_error when the mean photon number vanishes.
double g2(const ModeCoefficients& coeffs, const InitialState& state, int mode);
double g2_core(const MomentFn& moment, int mode);

// Intermode correlation factor sqrt(<A_j^dag^2 A_j^2><A_k^dag^2 A_k^2>) /
// <n_j n_k> - 1; values above zero violate the classical bound. Throws
// std::domain_error when the cross correlation vanishes.
double cauchy_schwarz_factor(const ModeCoefficients& coeffs, const InitialState& state,
                             int mode_j, int mode_k);
double cauchy_schwarz_core(const MomentFn& moment, int mode_j, int mode_k);

}  // namespace triosc
