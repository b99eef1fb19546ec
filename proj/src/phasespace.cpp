#include "triosc/phasespace.hpp"

#include <cmath>
#include <stdexcept>

#include "triosc/errors.hpp"
#include "triosc/numeric.hpp"
#include "triosc/quadrature.hpp"
#include "triosc/statistics.hpp"

namespace triosc {

namespace {

constexpr int kLaguerreMax = 512;
constexpr double kDegeneracyThreshold = 1e-8;
constexpr double kQuadratureTarget = 1e-6;

void validate_mode(int mode) {
  if (mode < 1 || mode > 3) throw std::invalid_argument("mode index must be 1, 2, or 3");
}

void require_fock(const InitialState& state) {
  state.validate();
  if (state.kind != StateKind::fock) {
    throw std::invalid_argument("phase-space closed forms require a Fock initial state");
  }
}

void require_finite(std::complex<double> alpha) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("phase-space point must be finite");
  }
}

double int_pow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// beta^m L_m^{-1/2}(g / beta), continuous through beta -> 0. For small beta
// the quotient argument is hollow, so the polynomial is expanded term by term
// with the beta powers absorbed: sum_k b_k (-g)^k beta^(m-k) / k!, where
// b_k = C(m - 1/2, m - k), b_m = 1, b_{k-1} = b_k (k - 1/2) / (m - k + 1).
double scaled_laguerre_term(double beta, int m, double g) {
  if (m == 0) return 1.0;
  if (g == 0.0) return int_pow(beta, m) * laguerre(m, -0.5, 0.0);
  if (std::abs(beta) >= 1e-3) {
    return int_pow(beta, m) * laguerre(m, -0.5, g / beta);
  }
  double b = 1.0;
  double gpow = 1.0;  // (-g)^k / k!, built downward from k = m
  for (int k = 1; k <= m; ++k) gpow *= -g / k;
  double beta_pow = 1.0;
  double total = 0.0;
  for (int k = m; k >= 0; --k) {
    total += b * gpow * beta_pow;
    if (k > 0) {
      b *= (k - 0.5) / (m - k + 1);
      gpow *= -k / g;
      beta_pow *= beta;
    }
  }
  return total;
}

struct ClosedFormParts {
  double a_plus, a_minus;  // leading squared pair (f1 +/- f2)^2
  double big_a_plus, big_a_minus;
  double big_b_plus, big_b_minus;
};

ClosedFormParts closed_form_parts(const ModeCoefficients& swapped) {
  const auto& f = swapped.f;
  const double ap = (f[0] + f[1]) * (f[0] + f[1]);
  const double am = (f[0] - f[1]) * (f[0] - f[1]);
  const double qp = (f[2] + f[3]) * (f[2] + f[3]);
  const double qm = (f[2] - f[3]) * (f[2] - f[3]);
  const double rp = (f[4] + f[5]) * (f[4] + f[5]);
  const double rm = (f[4] - f[5]) * (f[4] - f[5]);
  return {ap, am, ap + qp + rp, am + qm + rm, ap - qp - rp, am - qm - rm};
}

// Shared quadrature core for the s-ordered single-mode quasiprobability.
double quasiprobability_pass(const ModeCoefficients& coeffs, const InitialState& state,
                             int mode, std::complex<double> alpha, int s, int nodes) {
  const LinearForm row = coeffs.row(mode);
  std::array<double, 3> minus_sq{};
  std::array<double, 3> plus_sq{};
  double env_minus = 0.0;
  double env_plus = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double m = row.c[k] - row.d[k];
    const double p = row.c[k] + row.d[k];
    minus_sq[k] = m * m;
    plus_sq[k] = p * p;
    env_minus += m * m;
    env_plus += p * p;
  }
  const double damp = static_cast<double>(-s);  // 0 (Wigner) or 1 (Husimi)
  int n_tot = 0;
  for (double n : state.occupations) n_tot += static_cast<int>(n);
  const double cfac = std::sqrt(56.0 + 8.0 * n_tot);
  const double ru = cfac / std::sqrt(env_minus + damp);
  const double rv = cfac / std::sqrt(env_plus + damp);

  const QuadratureRule ru_rule = scaled_rule(nodes, ru);
  const QuadratureRule rv_rule = scaled_rule(nodes, rv);
  const double x = alpha.real();
  const double y = alpha.imag();

  Neumaier acc;
  for (int i = 0; i < nodes; ++i) {
    const double u = ru_rule.nodes[i];
    const double wu = ru_rule.weights[i];
    const double cos_u = std::cos(2.0 * y * u);
    for (int j = 0; j < nodes; ++j) {
      const double v = rv_rule.nodes[j];
      double integrand = 1.0;
      double exponent = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double eta_sq = u * u * minus_sq[k] + v * v * plus_sq[k];
        exponent += eta_sq;
        const int nk = static_cast<int>(state.occupations[k]);
        if (nk > 0) integrand *= laguerre(nk, 0.0, eta_sq);
      }
      exponent = -0.5 * exponent + 0.5 * s * (u * u + v * v);
      integrand *= std::exp(exponent) * cos_u * std::cos(2.0 * x * v);
      acc.add(wu * rv_rule.weights[j] * integrand);
    }
  }
  return acc.value() / (kPi * kPi);
}

double quasiprobability(const ModeCoefficients& coeffs, const InitialState& state,
                        int mode, std::complex<double> alpha, int s) {
  validate_mode(mode);
  require_fock(state);
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::invalid_argument("phase-space point must be finite");
  }
  double prev = quasiprobability_pass(coeffs, state, mode, alpha, s, 64);
  double estimate = 0.0;
  for (int nodes : {96, 144, 216}) {
    const double value = quasiprobability_pass(coeffs, state, mode, alpha, s, nodes);
    estimate = std::abs(value - prev);
    if (estimate <= kQuadratureTarget) return value;
    prev = value;
  }
  throw QuadratureError("quasiprobability quadrature failed to reach 1e-6", estimate);
}

}  // namespace

double laguerre(int n, double order, double x) {
  if (n < 0 || n > kLaguerreMax) {
    throw std::invalid_argument("Laguerre degree out of supported range");
  }
  if (n == 0) return 1.0;
  double lkm1 = 1.0;
  double lk = 1.0 + order - x;
  for (int k = 1; k < n; ++k) {
    const double lkp1 = ((2.0 * k + 1.0 + order - x) * lk - (k + order) * lkm1) / (k + 1.0);
    lkm1 = lk;
    lk = lkp1;
  }
  return lk;
}

std::vector<double> laguerre_row(int n, double order, double x) {
  if (n < 0 || n > kLaguerreMax) {
    throw std::invalid_argument("Laguerre degree out of supported range");
  }
  std::vector<double> out(n + 1);
  out[0] = 1.0;
  if (n == 0) return out;
  out[1] = 1.0 + order - x;
  for (int k = 1; k < n; ++k) {
    out[k + 1] = ((2.0 * k + 1.0 + order - x) * out[k] - (k + order) * out[k - 1]) / (k + 1.0);
  }
  return out;
}

PhasePoint transformed_arguments(const ModeCoefficients& coeffs, const PhasePoint& zetas) {
  PhasePoint out{};
  for (int j = 0; j < 3; ++j) {
    const LinearForm row = coeffs.row(j + 1);
    const std::complex<double> z = zetas[j];
    const std::complex<double> zc = std::conj(z);
    for (int k = 0; k < 3; ++k) {
      out[k] += z * row.c[k] - zc * row.d[k];
    }
  }
  return out;
}

std::complex<double> characteristic_function(const ModeCoefficients& coeffs,
                                             const InitialState& state,
                                             const PhasePoint& zetas, int s) {
  require_fock(state);
  if (s < -1 || s > 1) throw std::invalid_argument("ordering parameter must be -1, 0, or 1");
  double zeta_norm = 0.0;
  for (const auto& z : zetas) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("phase-space point must be finite");
    }
    zeta_norm += std::norm(z);
  }
  const PhasePoint eta = transformed_arguments(coeffs, zetas);
  std::complex<double> value = 1.0;
  for (int k = 0; k < 3; ++k) {
    const double nsq = std::norm(eta[k]);
    value *= std::exp(-0.5 * nsq) *
             laguerre(static_cast<int>(state.occupations[k]), 0.0, nsq);
  }
  if (s != 0) value *= std::exp(0.5 * s * zeta_norm);
  return value;
}

double joint_wigner(const ModeCoefficients& coeffs, const InitialState& state,
                    const PhasePoint& alphas) {
  require_fock(state);
  const PhasePoint eps = transformed_arguments(coeffs, alphas);
  int n_tot = 0;
  double value = 8.0 / (kPi * kPi * kPi);
  for (int k = 0; k < 3; ++k) {
    const double nsq = std::norm(eps[k]);
    const int nk = static_cast<int>(state.occupations[k]);
    n_tot += nk;
    value *= std::exp(-2.0 * nsq) * laguerre(nk, 0.0, 4.0 * nsq);
  }
  return (n_tot % 2 == 0) ? value : -value;
}

WignerAux wigner_closed_aux(const ModeCoefficients& coeffs, int mode,
                            std::complex<double> alpha) {
  validate_mode(mode);
  const ModeCoefficients swapped = swap_transform(coeffs, mode);
  const auto& f = swapped.f;
  const ClosedFormParts parts = closed_form_parts(swapped);
  const double x = alpha.real();
  const double y = alpha.imag();
  const double re2 = 2.0 * (x * x - y * y);  // alpha^2 + conj(alpha)^2
  const double abs2 = x * x + y * y;

  WignerAux aux;
  aux.a_plus = parts.big_a_plus;
  aux.a_minus = parts.big_a_minus;
  aux.b_plus = parts.big_b_plus;
  aux.b_minus = parts.big_b_minus;
  aux.c_plus = re2 * (f[0] * f[1] + f[2] * f[3] + f[4] * f[5]);
  aux.c_minus = re2 * (f[0] * f[1] - f[2] * f[3] - f[4] * f[5]);
  aux.d_plus = -abs2 * (f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3] +
                        f[4] * f[4] + f[5] * f[5]);
  aux.d_minus = -abs2 * (f[0] * f[0] + f[1] * f[1] - f[2] * f[2] - f[3] * f[3] -
                         f[4] * f[4] - f[5] * f[5]);
  aux.h_plus = aux.c_plus + aux.d_plus;
  aux.h_minus = aux.c_minus + aux.d_minus;
  aux.delta = aux.a_plus * aux.b_minus - aux.a_minus * aux.b_plus;
  aux.z1 = 2.0 * (aux.a_minus + aux.b_minus) *
           (aux.a_minus * aux.h_minus - aux.b_minus * aux.h_plus) /
           (aux.a_minus * aux.b_minus * aux.delta);
  aux.z2 = 2.0 * (aux.a_plus + aux.b_plus) *
           (aux.b_plus * aux.h_plus - aux.a_plus * aux.h_minus) /
           (aux.a_plus * aux.b_plus * aux.delta);
  return aux;
}

double wigner_closed_formula(const ModeCoefficients& coeffs, int mode, int n,
                             std::complex<double> alpha) {
  validate_mode(mode);
  require_finite(alpha);
  if (n < 0 || n > kLaguerreMax) throw std::invalid_argument("occupation out of range");
  const ModeCoefficients swapped = swap_transform(coeffs, mode);
  const ClosedFormParts parts = closed_form_parts(swapped);
  const double x = alpha.real();
  const double y = alpha.imag();

  const double prod = parts.big_a_minus * parts.big_a_plus;
  // Stable equivalent of C+ + D+; never a difference of like magnitudes.
  const double h_plus = -x * x * parts.big_a_minus - y * y * parts.big_a_plus;
  const double beta_minus = parts.big_b_minus / parts.big_a_minus;
  const double beta_plus = parts.big_b_plus / parts.big_a_plus;
  // Quotient arguments with the degenerate factor cancelled exactly:
  // z1 = g1 / beta_minus, z2 = g2 / beta_plus.
  const double g1 = 4.0 * parts.a_minus * y * y / (parts.big_a_minus * parts.big_a_minus);
  const double g2 = 4.0 * parts.a_plus * x * x / (parts.big_a_plus * parts.big_a_plus);

  double sum = 0.0;
  for (int l = 0; l <= n; ++l) {
    sum += scaled_laguerre_term(beta_minus, n - l, g1) *
           scaled_laguerre_term(beta_plus, l, g2);
  }
  const double prefactor = 2.0 / (kPi * std::sqrt(prod)) * std::exp(2.0 * h_plus / prod);
  const double value = prefactor * sum;
  return (n % 2 == 0) ? value : -value;
}

WignerValue single_mode_wigner_closed(const ModeCoefficients& coeffs, int mode, int n,
                                      std::complex<double> alpha) {
  validate_mode(mode);
  if (n < 0 || n > kLaguerreMax) throw std::invalid_argument("occupation out of range");
  const ModeCoefficients swapped = swap_transform(coeffs, mode);
  const ClosedFormParts parts = closed_form_parts(swapped);
  const double delta = parts.big_a_plus * parts.big_b_minus - parts.big_a_minus * parts.big_b_plus;
  if (std::abs(delta) < kDegeneracyThreshold) {
    InitialState state{StateKind::fock, {0.0, 0.0, 0.0}};
    state.occupations[mode - 1] = static_cast<double>(n);
    return {single_mode_wigner_numeric(coeffs, state, mode, alpha),
            WignerMethod::quadrature};
  }
  return {wigner_closed_formula(coeffs, mode, n, alpha), WignerMethod::closed_form};
}

double single_mode_wigner_numeric(const ModeCoefficients& coeffs, const InitialState& state,
                                  int mode, std::complex<double> alpha) {
  return quasiprobability(coeffs, state, mode, alpha, 0);
}

double single_mode_quasiprobability_numeric(const ModeCoefficients& coeffs,
                                            const InitialState& state, int mode,
                                            std::complex<double> alpha, int s) {
  if (s != 0 && s != -1) {
    throw std::invalid_argument("quasiprobability transform supports s = 0 or s = -1");
  }
  return quasiprobability(coeffs, state, mode, alpha, s);
}

Pnd photon_number_distribution(const ModeCoefficients& coeffs, const InitialState& state,
                               int mode, int n_max, Exec exec) {
  validate_mode(mode);
  require_fock(state);
  if (n_max < 0 || n_max > 64) {
    throw std::invalid_argument("n_max must lie in [0, 64]");
  }

  bool spectators_vacuum = true;
  for (int k = 0; k < 3; ++k) {
    if (k != mode - 1 && state.occupations[k] != 0.0) spectators_vacuum = false;
  }
  const int n_target = static_cast<int>(state.occupations[mode - 1]);

  const auto [var_x, var_y] = quadrature_variance_closed_form(coeffs, state, {mode});
  int n_tot = 0;
  for (double n : state.occupations) n_tot += static_cast<int>(n);
  const double cfac = std::sqrt(56.0 + 8.0 * n_tot);
  const double r_kernel = std::sqrt(n_max + 2.5 * std::sqrt(static_cast<double>(n_max)) + 4.0);
  const double rx = std::min(cfac * std::sqrt(var_x), r_kernel);
  const double ry = std::min(cfac * std::sqrt(var_y), r_kernel);
  const int nodes = std::max(
      128, static_cast<int>(std::ceil(8.0 * std::max(rx, ry) * std::sqrt(n_max + 4.0))));

  const QuadratureRule rule_x = scaled_rule(nodes, rx);
  const QuadratureRule rule_y = scaled_rule(nodes, ry);

  // Row-partitioned accumulation: each x-row sums its own kernel projections,
  // then rows are reduced in fixed order, so the result is independent of the
  // execution policy.
  std::vector<std::vector<double>> row_sums(nodes, std::vector<double>(n_max + 1, 0.0));
  parallel_for(exec, static_cast<std::size_t>(nodes), [&](std::size_t i) {
    std::vector<Neumaier> acc(n_max + 1);
    std::vector<double> kernel(n_max + 1);
    const double x = rule_x.nodes[i];
    const double wx = rule_x.weights[i];
    for (int j = 0; j < nodes; ++j) {
      const double y = rule_y.nodes[j];
      const std::complex<double> alpha{x, y};
      const double w = spectators_vacuum
                           ? wigner_closed_formula(coeffs, mode, n_target, alpha)
                           : single_mode_wigner_numeric(coeffs, state, mode, alpha);
      const double r2 = x * x + y * y;
      const double base = wx * rule_y.weights[j] * w * std::exp(-2.0 * r2);
      const double arg = 4.0 * r2;
      kernel[0] = 1.0;
      if (n_max >= 1) kernel[1] = 1.0 - arg;
      for (int k = 1; k < n_max; ++k) {
        kernel[k + 1] = ((2.0 * k + 1.0 - arg) * kernel[k] - k * kernel[k - 1]) / (k + 1.0);
      }
      for (int n = 0; n <= n_max; ++n) acc[n].add(base * kernel[n]);
    }
    for (int n = 0; n <= n_max; ++n) row_sums[i][n] = acc[n].value();
  });

  Pnd result;
  result.p.resize(n_max + 1);
  Neumaier total;
  double worst_excess = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    Neumaier acc;
    for (int i = 0; i < nodes; ++i) acc.add(row_sums[i][n]);
    double p = 2.0 * acc.value();
    if (n % 2 == 1) p = -p;
    total.add(p);
    if (p < -1e-6) worst_excess = std::max(worst_excess, -p);
    if (p > 1.0 + 1e-6) worst_excess = std::max(worst_excess, p - 1.0);
    result.p[n] = std::min(1.0, std::max(0.0, p));
  }
  if (worst_excess > 0.0) {
    throw QuadratureError("photon-number probabilities left [0, 1]", worst_excess);
  }
  result.tail_mass = 1.0 - total.value();
  if (result.tail_mass > 1e-3) {
    throw TruncationError("n_max too small to capture the photon-number distribution",
                          std::min(64, 2 * n_max + 8));
  }
  return result;
}

}  // namespace triosc
