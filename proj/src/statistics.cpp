#include "triosc/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace triosc {

namespace {

using cplx = std::complex<double>;

void validate_mode_set(const std::vector<int>& modes) {
  if (modes.empty() || modes.size() > 3) {
    throw std::invalid_argument("mode set must contain one to three modes");
  }
  for (int m : modes) {
    if (m < 1 || m > 3) throw std::invalid_argument("mode index must be 1, 2, or 3");
  }
  std::vector<int> sorted = modes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("mode set must not repeat a mode");
  }
}

void validate_pair(int j, int k) {
  if (j < 1 || j > 3 || k < 1 || k > 3) {
    throw std::invalid_argument("mode index must be 1, 2, or 3");
  }
  if (j == k) throw std::invalid_argument("mode pair must be distinct");
}

double mean_occupation(const MomentFn& moment, int mode) {
  return moment({{mode, true}, {mode, false}}).real();
}

}  // namespace

SqueezingReport quadrature_squeezing_core(const MomentFn& moment,
                                          const std::vector<int>& modes) {
  validate_mode_set(modes);
  cplx sum_x2{};
  cplx sum_y2{};
  cplx sum_a{};
  cplx sum_ad{};
  for (int j : modes) {
    sum_a += moment({{j, false}});
    sum_ad += moment({{j, true}});
    for (int k : modes) {
      const cplx aa = moment({{j, false}, {k, false}});
      const cplx aad = moment({{j, false}, {k, true}});
      const cplx ada = moment({{j, true}, {k, false}});
      const cplx adad = moment({{j, true}, {k, true}});
      sum_x2 += aa + aad + ada + adad;
      sum_y2 -= aa - aad - ada + adad;
    }
  }
  const double mean_x = 0.5 * (sum_a + sum_ad).real();
  const double mean_y = 0.5 * (sum_a - sum_ad).imag();
  const double m = static_cast<double>(modes.size());

  SqueezingReport r;
  r.modes = modes;
  r.var_x = 0.25 * sum_x2.real() - mean_x * mean_x;
  r.var_y = 0.25 * sum_y2.real() - mean_y * mean_y;
  r.bound = 0.25 * m;
  r.S = (r.var_x - r.bound) / r.bound;
  r.Q = (r.var_y - r.bound) / r.bound;
  return r;
}

SqueezingReport quadrature_squeezing(const ModeCoefficients& coeffs,
                                     const InitialState& state,
                                     const std::vector<int>& modes) {
  return quadrature_squeezing_core(moment_function(coeffs, state), modes);
}

std::pair<double, double> quadrature_variance_closed_form(const ModeCoefficients& coeffs,
                                                          const InitialState& state,
                                                          const std::vector<int>& modes) {
  validate_mode_set(modes);
  state.validate();
  double var_x = 0.0;
  double var_y = 0.0;
  for (int k = 0; k < 3; ++k) {
    double u = 0.0;
    double v = 0.0;
    for (int j : modes) {
      const LinearForm row = coeffs.row(j);
      u += row.c[k] + row.d[k];
      v += row.c[k] - row.d[k];
    }
    const double weight = 1.0 + 2.0 * state.occupations[k];
    var_x += 0.25 * weight * u * u;
    var_y += 0.25 * weight * v * v;
  }
  return {var_x, var_y};
}

std::pair<double, double> third_mode_variance_closed_form(const CouplingParams& p,
                                                          const InitialState& state,
                                                          double t) {
  state.validate();
  const ModeCoefficients coeffs = special_case_coefficients(p, t);
  const double kbar_sq = *coeffs.kbar_sq;
  const double y = kbar_sq * t * t;
  double cb, sb;
  if (y > 1e-8) {
    const double k = std::sqrt(kbar_sq);
    cb = std::cos(k * t);
    sb = std::sin(k * t) / k;
  } else if (y < -1e-8) {
    const double k = std::sqrt(-kbar_sq);
    cb = std::cosh(k * t);
    sb = std::sinh(k * t) / k;
  } else {
    cb = 1.0 - y / 2.0 + y * y / 24.0;
    sb = t * (1.0 - y / 6.0 + y * y / 120.0);
  }
  const double lam = p.lambda2;
  const double n12 = state.occupations[0] + state.occupations[1];
  const double n3 = state.occupations[2];
  const double conv = 2.0 * (1.0 + n12) * lam * lam * sb * sb;
  const double plus = cb + 0.5 * p.lambda1 * sb;
  const double minus = cb - 0.5 * p.lambda1 * sb;
  const double var_x = 0.25 * std::exp(-p.lambda1 * t) * (conv + (1.0 + 2.0 * n3) * plus * plus);
  const double var_y = 0.25 * std::exp(p.lambda1 * t) * (conv + (1.0 + 2.0 * n3) * minus * minus);
  return {var_x, var_y};
}

SqueezingReport sum_squeezing_core(const MomentFn& moment, int mode_j, int mode_k) {
  validate_pair(mode_j, mode_k);
  const Letter j{mode_j, false};
  const Letter jd{mode_j, true};
  const Letter k{mode_k, false};
  const Letter kd{mode_k, true};

  const cplx b = moment({j, k});
  const cplx bd = moment({kd, jd});
  const cplx bb = moment({j, k, j, k});
  const cplx bbd = moment({j, k, kd, jd});
  const cplx bdb = moment({kd, jd, j, k});
  const cplx bdbd = moment({kd, jd, kd, jd});

  const double mean_x = 0.5 * (b + bd).real();
  const double mean_y = 0.5 * (b - bd).imag();
  const double x2 = 0.25 * (bb + bbd + bdb + bdbd).real();
  const double y2 = -0.25 * (bb - bbd - bdb + bdbd).real();

  SqueezingReport r;
  r.modes = {mode_j, mode_k};
  r.var_x = x2 - mean_x * mean_x;
  r.var_y = y2 - mean_y * mean_y;
  r.bound = 0.25 * (mean_occupation(moment, mode_j) + mean_occupation(moment, mode_k) + 1.0);
  r.S = (r.var_x - r.bound) / r.bound;
  r.Q = (r.var_y - r.bound) / r.bound;
  return r;
}

SqueezingReport sum_squeezing(const ModeCoefficients& coeffs, const InitialState& state,
                              int mode_j, int mode_k) {
  return sum_squeezing_core(moment_function(coeffs, state), mode_j, mode_k);
}

double g2_core(const MomentFn& moment, int mode) {
  if (mode < 1 || mode > 3) throw std::invalid_argument("mode index must be 1, 2, or 3");
  const double mean = mean_occupation(moment, mode);
  if (mean <= 0.0) {
    throw std::domain_error("second-order coherence undefined at zero mean photon number");
  }
  const double quartic =
      moment({{mode, true}, {mode, true}, {mode, false}, {mode, false}}).real();
  return quartic / (mean * mean);
}

double g2(const ModeCoefficients& coeffs, const InitialState& state, int mode) {
  return g2_core(moment_function(coeffs, state), mode);
}

double cauchy_schwarz_core(const MomentFn& moment, int mode_j, int mode_k) {
  validate_pair(mode_j, mode_k);
  const double qj =
      moment({{mode_j, true}, {mode_j, true}, {mode_j, false}, {mode_j, false}}).real();
  const double qk =
      moment({{mode_k, true}, {mode_k, true}, {mode_k, false}, {mode_k, false}}).real();
  const double cross =
      moment({{mode_j, true}, {mode_j, false}, {mode_k, true}, {mode_k, false}}).real();
  if (cross <= 0.0) {
    throw std::domain_error("correlation factor undefined at zero photon-number correlation");
  }
  return std::sqrt(qj * qk) / cross - 1.0;
}

double cauchy_schwarz_factor(const ModeCoefficients& coeffs, const InitialState& state,
                             int mode_j, int mode_k) {
  return cauchy_schwarz_core(moment_function(coeffs, state), mode_j, mode_k);
}

}  // namespace triosc
