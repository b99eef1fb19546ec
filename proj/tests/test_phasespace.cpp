#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "triosc/dynamics.hpp"
#include "triosc/errors.hpp"
#include "triosc/moments.hpp"
#include "triosc/numeric.hpp"
#include "triosc/oracle.hpp"
#include "triosc/phasespace.hpp"
#include "triosc/quadrature.hpp"
#include "triosc/statistics.hpp"

using namespace triosc;

namespace {

const InitialState kVacuum{StateKind::fock, {0.0, 0.0, 0.0}};

double fock_wigner(int n, std::complex<double> alpha) {
  const double r2 = std::norm(alpha);
  const double v = 2.0 / kPi * std::exp(-2.0 * r2) * laguerre(n, 0.0, 4.0 * r2);
  return (n % 2 == 0) ? v : -v;
}

// Real 6x6 matrix of the alpha -> epsilon map, probed numerically.
using Map6 = std::array<std::array<double, 6>, 6>;

Map6 probe_argument_map(const ModeCoefficients& coeffs) {
  Map6 m{};
  for (int col = 0; col < 6; ++col) {
    PhasePoint alphas{};
    if (col % 2 == 0) {
      alphas[col / 2] = {1.0, 0.0};
    } else {
      alphas[col / 2] = {0.0, 1.0};
    }
    const PhasePoint eps = transformed_arguments(coeffs, alphas);
    for (int j = 0; j < 3; ++j) {
      m[2 * j][col] = eps[j].real();
      m[2 * j + 1][col] = eps[j].imag();
    }
  }
  return m;
}

// Inverts the map by Gauss-Jordan elimination; also returns |det|.
std::pair<Map6, double> invert_map(Map6 m) {
  Map6 inv{};
  for (int i = 0; i < 6; ++i) inv[i][i] = 1.0;
  double det = 1.0;
  for (int col = 0; col < 6; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 6; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      std::swap(inv[pivot], inv[col]);
      det = -det;
    }
    det *= m[col][col];
    const double p = m[col][col];
    for (int j = 0; j < 6; ++j) {
      m[col][j] /= p;
      inv[col][j] /= p;
    }
    for (int r = 0; r < 6; ++r) {
      if (r == col) continue;
      const double f = m[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 6; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return {inv, std::abs(det)};
}

// Integrates the joint Wigner function over all six real dimensions by
// quadrature on a grid adapted to the Gaussian envelope.
double joint_wigner_normalization(const ModeCoefficients& coeffs, const InitialState& state,
                                  int nodes_per_axis) {
  const auto [inv, det] = invert_map(probe_argument_map(coeffs));
  const QuadratureRule rule = scaled_rule(nodes_per_axis, 2.9);
  const int n = nodes_per_axis;
  double total = 0.0;
  std::array<int, 6> idx{};
  for (idx[0] = 0; idx[0] < n; ++idx[0])
    for (idx[1] = 0; idx[1] < n; ++idx[1])
      for (idx[2] = 0; idx[2] < n; ++idx[2])
        for (idx[3] = 0; idx[3] < n; ++idx[3])
          for (idx[4] = 0; idx[4] < n; ++idx[4])
            for (idx[5] = 0; idx[5] < n; ++idx[5]) {
              std::array<double, 6> eps_coords{};
              double weight = 1.0;
              for (int d = 0; d < 6; ++d) {
                eps_coords[d] = rule.nodes[idx[d]];
                weight *= rule.weights[idx[d]];
              }
              std::array<double, 6> a{};
              for (int r = 0; r < 6; ++r) {
                for (int c = 0; c < 6; ++c) a[r] += inv[r][c] * eps_coords[c];
              }
              const PhasePoint alphas{{{a[0], a[1]}, {a[2], a[3]}, {a[4], a[5]}}};
              total += weight * joint_wigner(coeffs, state, alphas);
            }
  return total / det;
}

}  // namespace

TEST_CASE("generalized Laguerre basics") {
  CHECK(laguerre(0, 0.7, 3.1) == 1.0);
  CHECK(laguerre(1, 0.7, 3.1) == doctest::Approx(1.0 + 0.7 - 3.1).epsilon(1e-15));
  // 1 - 3x + 3x^2/2 - x^3/6 at x = 2.
  CHECK(laguerre(3, 0.0, 2.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  const auto row = laguerre_row(6, -0.5, 1.3);
  for (int k = 0; k <= 6; ++k) {
    CHECK(row[k] == doctest::Approx(laguerre(k, -0.5, 1.3)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(laguerre(513, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(laguerre(-1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("Laguerre composition identity at order -1/2") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> arg(0.0, 8.0);
  std::uniform_int_distribution<int> deg(0, 20);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = arg(rng);
    const double y = arg(rng);
    const int n = deg(rng);
    double sum = 0.0;
    for (int l = 0; l <= n; ++l) {
      sum += laguerre(l, -0.5, x) * laguerre(n - l, -0.5, y);
    }
    CHECK(sum == doctest::Approx(laguerre(n, 0.0, x + y)).epsilon(1e-10));
  }
}

TEST_CASE("characteristic function limits and ordering ladder") {
  const ModeCoefficients c = general_coefficients({0.3, 0.4, 0.2}, 1.4);
  const InitialState state{StateKind::fock, {1.0, 0.0, 2.0}};
  for (int s : {-1, 0, 1}) {
    CHECK(characteristic_function(c, state, {}, s) == std::complex<double>(1.0, 0.0));
  }

  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  const PhasePoint z{{{0.3, -0.2}, {0.1, 0.4}, {-0.5, 0.2}}};
  double norm_sum = 0.0;
  for (const auto& zj : z) norm_sum += std::norm(zj);
  CHECK(characteristic_function(id, kVacuum, z, 0).real() ==
        doctest::Approx(std::exp(-0.5 * norm_sum)).epsilon(1e-13));

  const auto c0 = characteristic_function(c, state, z, 0);
  const auto c1 = characteristic_function(c, state, z, 1);
  const auto cm1 = characteristic_function(c, state, z, -1);
  CHECK(std::abs(c1 - c0 * std::exp(0.5 * norm_sum)) <= 1e-15 * std::abs(c1));
  CHECK(std::abs(cm1 - c0 * std::exp(-0.5 * norm_sum)) <= 1e-15 * std::abs(cm1));

  const InitialState thermal{StateKind::thermal, {0.5, 0.0, 0.0}};
  CHECK_THROWS_AS(characteristic_function(c, thermal, z, 0), std::invalid_argument);
  CHECK_THROWS_AS(characteristic_function(c, state, z, 2), std::invalid_argument);
}

TEST_CASE("joint Wigner values and parity at the origin") {
  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  const double base = 8.0 / (kPi * kPi * kPi);
  CHECK(joint_wigner(id, kVacuum, {}) == doctest::Approx(base).epsilon(1e-13));
  CHECK(joint_wigner(id, {StateKind::fock, {1.0, 0.0, 0.0}}, {}) ==
        doctest::Approx(-base).epsilon(1e-13));
  CHECK(joint_wigner(id, {StateKind::fock, {1.0, 1.0, 0.0}}, {}) ==
        doctest::Approx(base).epsilon(1e-13));
  CHECK(joint_wigner(id, {StateKind::fock, {1.0, 1.0, 1.0}}, {}) ==
        doctest::Approx(-base).epsilon(1e-13));

  // t = 0: product of single-mode Fock Wigner functions.
  const PhasePoint alphas{{{0.4, -0.1}, {0.2, 0.3}, {-0.6, 0.5}}};
  const InitialState state{StateKind::fock, {2.0, 0.0, 1.0}};
  const double expected =
      fock_wigner(2, alphas[0]) * fock_wigner(0, alphas[1]) * fock_wigner(1, alphas[2]);
  CHECK(joint_wigner(id, state, alphas) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("joint Wigner integrates to one") {
  const ModeCoefficients c = general_coefficients({0.3, 0.2, 0.4}, 0.8);
  CHECK(joint_wigner_normalization(c, kVacuum, 18) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(joint_wigner_normalization(c, {StateKind::fock, {1.0, 0.0, 0.0}}, 18) ==
        doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("marginalizing the joint Wigner gives the single-mode function") {
  const ModeCoefficients c = general_coefficients({0.25, 0.2, 0.3}, 0.6);
  const int nodes = 40;
  const QuadratureRule rule = scaled_rule(nodes, 4.5);
  for (const std::complex<double> alpha1 : {std::complex<double>{0.0, 0.0},
                                            std::complex<double>{0.3, 0.2}}) {
    double total = 0.0;
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j)
        for (int k = 0; k < nodes; ++k)
          for (int l = 0; l < nodes; ++l) {
            const PhasePoint alphas{{alpha1,
                                     {rule.nodes[i], rule.nodes[j]},
                                     {rule.nodes[k], rule.nodes[l]}}};
            total += rule.weights[i] * rule.weights[j] * rule.weights[k] *
                     rule.weights[l] * joint_wigner(c, kVacuum, alphas);
          }
    const double single = single_mode_wigner_numeric(c, kVacuum, 1, alpha1);
    CHECK(total == doctest::Approx(single).epsilon(1e-4));
  }
}

TEST_CASE("numeric single-mode Wigner matches Fock Wigner at t=0") {
  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  for (int n : {0, 1, 2}) {
    InitialState state = kVacuum;
    state.occupations[1] = n;
    for (const std::complex<double> alpha :
         {std::complex<double>{0.0, 0.0}, {0.5, 0.0}, {-0.3, 0.7}, {1.1, -0.4}}) {
      const double numeric = single_mode_wigner_numeric(id, state, 2, alpha);
      CHECK(numeric == doctest::Approx(fock_wigner(n, alpha)).epsilon(1e-6));
    }
  }
}

TEST_CASE("numeric Wigner with occupied spectators stays normalized") {
  const ModeCoefficients c = general_coefficients({0.2, 0.3, 0.25}, 0.9);
  const InitialState ones{StateKind::fock, {1.0, 1.0, 1.0}};
  const int nodes = 40;
  const QuadratureRule rule = scaled_rule(nodes, 4.0);
  double total = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      const std::complex<double> alpha{rule.nodes[i], rule.nodes[j]};
      total += rule.weights[i] * rule.weights[j] *
               single_mode_wigner_numeric(c, ones, 3, alpha);
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("closed-form single-mode Wigner at its pinned limits") {
  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  // Exact at t=0 through the composition identity.
  CHECK(wigner_closed_formula(id, 1, 1, {0.0, 0.0}) ==
        doctest::Approx(-2.0 / kPi).epsilon(1e-14));
  for (const std::complex<double> alpha : {std::complex<double>{0.6, -0.2}, {0.1, 0.9}}) {
    for (int n : {0, 1, 3}) {
      CHECK(wigner_closed_formula(id, 1, n, alpha) ==
            doctest::Approx(fock_wigner(n, alpha)).epsilon(1e-12));
    }
  }

  // Amplifier on vacuum: thermal Gaussian with n-bar = sinh^2.  Amplification
  // alone keeps both quadrature branches balanced, which is the degenerate
  // surface, so the public operation reports the quadrature route.
  const double l1 = 0.6, t = 1.1;
  const ModeCoefficients amp = general_coefficients({l1, 0.0, 0.0}, t);
  const double ch2 = std::cosh(2.0 * l1 * t);
  const WignerValue origin = single_mode_wigner_closed(amp, 1, 0, {0.0, 0.0});
  CHECK(origin.method == WignerMethod::quadrature);
  CHECK(origin.value == doctest::Approx(2.0 / (kPi * ch2)).epsilon(1e-6));
  const std::complex<double> alpha{0.4, -0.3};
  const WignerValue off = single_mode_wigner_closed(amp, 1, 0, alpha);
  CHECK(off.value ==
        doctest::Approx(2.0 / (kPi * ch2) * std::exp(-2.0 * std::norm(alpha) / ch2))
            .epsilon(1e-6));
  // The raw evaluator is regular there; its arguments never divide by the
  // branch gap, so it reproduces the Gaussian directly.
  CHECK(wigner_closed_formula(amp, 1, 0, alpha) ==
        doctest::Approx(2.0 / (kPi * ch2) * std::exp(-2.0 * std::norm(alpha) / ch2))
            .epsilon(1e-12));
}

TEST_CASE("closed form agrees with quadrature away from degeneracy") {
  const ModeCoefficients c = special_case_coefficients({0.25, 0.3, 0.3}, 2.0);
  InitialState state = kVacuum;
  state.occupations[0] = 1.0;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (double y : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const WignerValue closed = single_mode_wigner_closed(c, 1, 1, {x, y});
      CHECK(closed.method == WignerMethod::closed_form);
      const double numeric = single_mode_wigner_numeric(c, state, 1, {x, y});
      CHECK(closed.value == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("closed form agrees with quadrature for every observed mode") {
  // Occupied observed modes 2 and 3 exercise the relabeled leading slots.
  const ModeCoefficients c = general_coefficients({0.45, 0.3, 0.2}, 1.7);
  for (int mode : {1, 2, 3}) {
    for (int n : {1, 2}) {
      InitialState state = kVacuum;
      state.occupations[mode - 1] = static_cast<double>(n);
      for (double x : {-0.8, 0.0, 0.6}) {
        for (double y : {-0.5, 0.4}) {
          const WignerValue closed = single_mode_wigner_closed(c, mode, n, {x, y});
          CHECK(closed.method == WignerMethod::closed_form);
          const double numeric = single_mode_wigner_numeric(c, state, mode, {x, y});
          CHECK(closed.value == doctest::Approx(numeric).epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("degenerate surface falls back to quadrature with a method tag") {
  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  const WignerValue v = single_mode_wigner_closed(id, 1, 1, {0.3, 0.1});
  CHECK(v.method == WignerMethod::quadrature);
  CHECK(v.value == doctest::Approx(fock_wigner(1, {0.3, 0.1})).epsilon(1e-6));

  const WignerAux aux = wigner_closed_aux(id, 1, {0.3, 0.1});
  CHECK(aux.delta == 0.0);
  CHECK(aux.a_plus == doctest::Approx(1.0));
  CHECK(aux.a_minus == doctest::Approx(1.0));
}

TEST_CASE("Wigner aux quotients match the reduced arguments off degeneracy") {
  const ModeCoefficients c = general_coefficients({0.45, 0.3, 0.2}, 1.7);
  const std::complex<double> alpha{0.7, -0.4};
  const WignerAux aux = wigner_closed_aux(c, 1, alpha);
  CHECK(std::abs(aux.delta) > 1e-8);
  // Reduced equivalents: z1 = 4 a_- y^2 / (A_- B_-), z2 = 4 a_+ x^2 / (A_+ B_+).
  const auto& f = c.f;
  const double am = (f[0] - f[1]) * (f[0] - f[1]);
  const double ap = (f[0] + f[1]) * (f[0] + f[1]);
  const double z1 = 4.0 * am * alpha.imag() * alpha.imag() / (aux.a_minus * aux.b_minus);
  const double z2 = 4.0 * ap * alpha.real() * alpha.real() / (aux.a_plus * aux.b_plus);
  CHECK(aux.z1 == doctest::Approx(z1).epsilon(1e-9));
  CHECK(aux.z2 == doctest::Approx(z2).epsilon(1e-9));
  CHECK(aux.h_plus == doctest::Approx(aux.c_plus + aux.d_plus).epsilon(1e-12));
}

TEST_CASE("Husimi function via the antinormal transform") {
  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  CHECK(single_mode_quasiprobability_numeric(id, kVacuum, 1, {0.0, 0.0}, -1) ==
        doctest::Approx(1.0 / kPi).epsilon(1e-6));
  CHECK_THROWS_AS(single_mode_quasiprobability_numeric(id, kVacuum, 1, {0.0, 0.0}, 1),
                  std::invalid_argument);

  const ModeCoefficients c = general_coefficients({0.3, 0.2, 0.1}, 1.0);
  const int nodes = 36;
  const QuadratureRule rule = scaled_rule(nodes, 4.5);
  double total = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      total += rule.weights[i] * rule.weights[j] *
               single_mode_quasiprobability_numeric(
                   c, kVacuum, 1, {rule.nodes[i], rule.nodes[j]}, -1);
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("photon-number distribution matches the truncated reference") {
  const CouplingParams p{0.3, 0.3, 0.3};
  InitialState state = kVacuum;
  state.occupations[2] = 1.0;
  const TruncatedState evolved = evolve_auto(p, state, 1.5);
  std::vector<double> marginal(evolved.cutoff + 1, 0.0);
  for (int n1 = 0; n1 <= evolved.cutoff; ++n1)
    for (int n2 = 0; n2 <= evolved.cutoff; ++n2)
      for (int n3 = 0; n3 <= evolved.cutoff; ++n3)
        marginal[n3] += std::norm(evolved.amp[evolved.index(n1, n2, n3)]);
  const Pnd pnd = photon_number_distribution(general_coefficients(p, 1.5), state, 3, 12);
  for (int n = 0; n <= 12; ++n) {
    CHECK(std::abs(pnd.p[n] - marginal[n]) < 1e-7);
  }
}

TEST_CASE("photon-number distribution of unevolved Fock states") {
  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  InitialState state = kVacuum;
  state.occupations[0] = 1.0;
  const Pnd pnd = photon_number_distribution(id, state, 1, 6);
  REQUIRE(pnd.p.size() == 7);
  CHECK(pnd.p[1] == doctest::Approx(1.0).epsilon(1e-6));
  for (int n : {0, 2, 3, 4, 5, 6}) CHECK(pnd.p[n] <= 1e-6);
  CHECK(std::abs(pnd.tail_mass) < 1e-3);
}

TEST_CASE("photon-number distribution sums to one after evolution") {
  const ModeCoefficients c = general_coefficients({0.25, 0.3, 0.3}, 2.0);
  InitialState state = kVacuum;
  state.occupations[2] = 1.0;
  const Pnd pnd = photon_number_distribution(c, state, 3, 16);
  double sum = 0.0;
  for (double p : pnd.p) {
    CHECK(p >= 0.0);
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(pnd.tail_mass) < 1e-3);
}

TEST_CASE("photon-number distribution is policy independent") {
  const ModeCoefficients c = general_coefficients({0.2, 0.25, 0.3}, 1.5);
  InitialState state = kVacuum;
  state.occupations[1] = 2.0;
  const Pnd seq = photon_number_distribution(c, state, 2, 12, Exec::seq);
  const Pnd par = photon_number_distribution(c, state, 2, 12, Exec::par);
  REQUIRE(seq.p.size() == par.p.size());
  for (std::size_t i = 0; i < seq.p.size(); ++i) CHECK(seq.p[i] == par.p[i]);
  CHECK(seq.tail_mass == par.tail_mass);
}

TEST_CASE("photon-number distribution validation") {
  const ModeCoefficients id = general_coefficients({0.0, 0.0, 0.0}, 0.0);
  CHECK_THROWS_AS(photon_number_distribution(id, kVacuum, 1, 65), std::invalid_argument);
  const InitialState thermal{StateKind::thermal, {0.5, 0.0, 0.0}};
  CHECK_THROWS_AS(photon_number_distribution(id, thermal, 1, 8), std::invalid_argument);
  // A six-photon state cannot fit a two-bin report.
  InitialState six = kVacuum;
  six.occupations[0] = 6.0;
  CHECK_THROWS_AS(photon_number_distribution(id, six, 1, 2), TruncationError);
}
