#pragma once

#include <array>
#include <optional>

namespace triosc {

using Mat6d = std::array<std::array<double, 6>, 6>;

struct CouplingParams {
  double lambda1 = 0.0;  // parametric amplifier, modes 1-2
  double lambda2 = 0.0;  // frequency converter, modes 1-3
  double lambda3 = 0.0;  // frequency converter, modes 2-3

  // Requires finite, non-negative couplings.
  void validate() const;
};

// One mode's evolved annihilation operator as a combination of the initial
// ladder operators: A = sum_k c[k] a_k + d[k] a_k^dag (k = mode index - 1).
struct LinearForm {
  std::array<double, 3> c{};
  std::array<double, 3> d{};
};

// Coefficient functions of the evolved ladder operators at a single time.
// f describes mode 1, g mode 2, h mode 3; index conventions follow row().
struct ModeCoefficients {
  double t = 0.0;
  std::array<double, 6> f{};
  std::array<double, 6> g{};
  std::array<double, 6> h{};
  // Squared oscillation rate of the equal-converter special case, when known.
  std::optional<double> kbar_sq;

  // mode in {1,2,3}; columns are always in the original mode order.
  LinearForm row(int mode) const;

  // 6x6 transfer matrix on (a1, a1^dag, a2, a2^dag, a3, a3^dag).
  Mat6d matrix() const;
  static ModeCoefficients from_matrix(const Mat6d& E, double t);
};

// Residuals of the canonical commutator identities. All vanish for exact
// coefficients; each is linear in a small perturbation of one coefficient.
struct IdentityReport {
  double norm_1 = 0.0;
  double norm_2 = 0.0;
  double norm_3 = 0.0;
  double cross_12 = 0.0;
  double cross_12_dag = 0.0;
  double cross_13 = 0.0;
  double cross_13_dag = 0.0;
  double cross_23 = 0.0;
  double cross_23_dag = 0.0;

  double max_abs() const;
  std::array<double, 9> values() const;
  static std::array<const char*, 9> names();
};

// Coefficients for arbitrary couplings via the matrix exponential of the
// linear Heisenberg system. Internally evaluated in extended precision.
ModeCoefficients general_coefficients(const CouplingParams& p, double t);

// Closed-form coefficients for the equal-converter case lambda2 == lambda3.
// Throws std::domain_error when the couplings are unequal.
ModeCoefficients special_case_coefficients(const CouplingParams& p, double t);

// Transfer-matrix product: applies `earlier` first, then `later`.
ModeCoefficients compose(const ModeCoefficients& later, const ModeCoefficients& earlier);

// Relabels modes 1 <-> target so closed forms written against the first row
// apply to any mode. Columns stay in the original order; involution.
ModeCoefficients swap_transform(const ModeCoefficients& coeffs, int target_mode);

// Commutator residuals of stored (double) coefficients, evaluated with
// exact-product compensation so the reported defect is that of the values
// themselves, not of the check.
IdentityReport verify_identities(const ModeCoefficients& coeffs);

// Commutator residuals of the coefficient map itself: recomputes the full
// chain for (p, t) in quadruple precision and reports residuals that are
// limited only by the method, not by double storage.
IdentityReport identity_residuals(const CouplingParams& p, double t);

}  // namespace triosc
