#include "triosc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "triosc/numeric.hpp"

namespace triosc {

namespace {

template <typename S>
S scalar_abs(S x) {
  return x < S(0) ? -x : x;
}

template <typename S>
using Mat6 = std::array<std::array<S, 6>, 6>;

template <typename S>
Mat6<S> zero6() {
  Mat6<S> m{};
  for (auto& row : m) row.fill(S(0));
  return m;
}

template <typename S>
Mat6<S> identity6() {
  Mat6<S> m = zero6<S>();
  for (int i = 0; i < 6; ++i) m[i][i] = S(1);
  return m;
}

template <typename S>
Mat6<S> matmul(const Mat6<S>& a, const Mat6<S>& b) {
  Mat6<S> r = zero6<S>();
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) {
      const S aik = a[i][k];
      if (aik == S(0)) continue;
      for (int j = 0; j < 6; ++j) r[i][j] += aik * b[k][j];
    }
  return r;
}

template <typename S>
S norm1(const Mat6<S>& a) {
  S best = S(0);
  for (int j = 0; j < 6; ++j) {
    S col = S(0);
    for (int i = 0; i < 6; ++i) col += scalar_abs(a[i][j]);
    if (col > best) best = col;
  }
  return best;
}

// Solves D X = N in place via partial-pivoted LU. D is well conditioned here
// (diagonal Pade denominator with spectral radius <= 1/4).
template <typename S>
Mat6<S> lu_solve(Mat6<S> d, Mat6<S> n) {
  std::array<int, 6> piv{};
  for (int i = 0; i < 6; ++i) piv[i] = i;
  for (int col = 0; col < 6; ++col) {
    int p = col;
    for (int r = col + 1; r < 6; ++r)
      if (scalar_abs(d[r][col]) > scalar_abs(d[p][col])) p = r;
    if (p != col) {
      std::swap(d[p], d[col]);
      std::swap(n[p], n[col]);
    }
    const S pivval = d[col][col];
    for (int r = col + 1; r < 6; ++r) {
      const S m = d[r][col] / pivval;
      if (m == S(0)) continue;
      d[r][col] = S(0);
      for (int j = col + 1; j < 6; ++j) d[r][j] -= m * d[col][j];
      for (int j = 0; j < 6; ++j) n[r][j] -= m * n[col][j];
    }
  }
  for (int col = 5; col >= 0; --col) {
    for (int j = 0; j < 6; ++j) {
      S acc = n[col][j];
      for (int k = col + 1; k < 6; ++k) acc -= d[col][k] * n[k][j];
      n[col][j] = acc / d[col][col];
    }
  }
  return n;
}

// Diagonal [10/10] Pade with scaling-and-squaring; pure arithmetic so it
// instantiates for quadruple precision without extra library support.
template <typename S>
Mat6<S> expm6(Mat6<S> a) {
  int squarings = 0;
  {
    S norm = norm1(a);
    while (norm > S(1) / S(4)) {
      norm = norm / S(2);
      ++squarings;
    }
  }
  if (squarings > 0) {
    S scale = S(1);
    for (int i = 0; i < squarings; ++i) scale = scale * S(2);
    for (auto& row : a)
      for (auto& x : row) x = x / scale;
  }

  constexpr int m = 10;
  std::array<S, m + 1> c{};
  c[0] = S(1);
  for (int k = 1; k <= m; ++k) c[k] = c[k - 1] * S(m - k + 1) / (S(k) * S(2 * m - k + 1));

  Mat6<S> pow = identity6<S>();
  Mat6<S> num = zero6<S>();
  Mat6<S> den = zero6<S>();
  for (int k = 0; k <= m; ++k) {
    if (k > 0) pow = matmul(pow, a);
    const S sign = (k % 2 == 0) ? S(1) : S(-1);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        num[i][j] += c[k] * pow[i][j];
        den[i][j] += sign * c[k] * pow[i][j];
      }
  }
  Mat6<S> e = lu_solve(den, num);
  for (int i = 0; i < squarings; ++i) e = matmul(e, e);
  return e;
}

// Generator of d/dt (a1, a1^dag, a2, a2^dag, a3, a3^dag) in the Heisenberg
// picture for the amplifier + two-converter interaction.
template <typename S>
Mat6<S> generator(const CouplingParams& p) {
  const S l1 = S(p.lambda1);
  const S l2 = S(p.lambda2);
  const S l3 = S(p.lambda3);
  Mat6<S> m = zero6<S>();
  m[0][3] = -l1;
  m[0][4] = -l2;
  m[1][2] = -l1;
  m[1][5] = -l2;
  m[2][1] = -l1;
  m[2][4] = -l3;
  m[3][0] = -l1;
  m[3][5] = -l3;
  m[4][0] = l2;
  m[4][2] = l3;
  m[5][1] = l2;
  m[5][3] = l3;
  return m;
}

template <typename S>
Mat6<S> transfer_matrix(const CouplingParams& p, double t) {
  Mat6<S> m = generator<S>(p);
  const S ts(t);
  for (auto& row : m)
    for (auto& x : row) x *= ts;
  return expm6(m);
}

ModeCoefficients extract_from(const Mat6<long double>& e, double t) {
  ModeCoefficients c;
  c.t = t;
  c.f = {static_cast<double>(e[0][0]), static_cast<double>(e[0][1]),
         static_cast<double>(-e[0][2]), static_cast<double>(-e[0][3]),
         static_cast<double>(-e[0][4]), static_cast<double>(-e[0][5])};
  c.g = {static_cast<double>(e[2][2]), static_cast<double>(e[2][3]),
         static_cast<double>(-e[2][0]), static_cast<double>(-e[2][1]),
         static_cast<double>(-e[2][4]), static_cast<double>(-e[2][5])};
  c.h = {static_cast<double>(e[4][4]), static_cast<double>(e[4][5]),
         static_cast<double>(e[4][2]), static_cast<double>(e[4][3]),
         static_cast<double>(e[4][0]), static_cast<double>(e[4][1])};
  return c;
}

void require_finite_time(double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
}

// Antisymmetric commutator metric [v_i, v_j] for v = (a1, a1^dag, ...).
constexpr double metricJ(int i, int j) {
  if (i / 2 != j / 2) return 0.0;
  if (i % 2 == 0 && j == i + 1) return 1.0;
  if (i % 2 == 1 && j == i - 1) return -1.0;
  return 0.0;
}

}  // namespace

void CouplingParams::validate() const {
  for (double l : {lambda1, lambda2, lambda3}) {
    if (!std::isfinite(l)) throw std::invalid_argument("coupling must be finite");
    if (l < 0.0) throw std::invalid_argument("coupling must be non-negative");
  }
}

LinearForm ModeCoefficients::row(int mode) const {
  switch (mode) {
    case 1:
      return {{f[0], -f[2], -f[4]}, {f[1], -f[3], -f[5]}};
    case 2:
      return {{-g[2], g[0], -g[4]}, {-g[3], g[1], -g[5]}};
    case 3:
      return {{h[4], h[2], h[0]}, {h[5], h[3], h[1]}};
    default:
      throw std::invalid_argument("mode index must be 1, 2, or 3");
  }
}

Mat6d ModeCoefficients::matrix() const {
  Mat6d e{};
  for (int mode = 1; mode <= 3; ++mode) {
    const LinearForm lf = row(mode);
    const int r = 2 * (mode - 1);
    for (int k = 0; k < 3; ++k) {
      e[r][2 * k] = lf.c[k];
      e[r][2 * k + 1] = lf.d[k];
      // Conjugate row: coefficients swap roles (all entries real).
      e[r + 1][2 * k] = lf.d[k];
      e[r + 1][2 * k + 1] = lf.c[k];
    }
  }
  return e;
}

ModeCoefficients ModeCoefficients::from_matrix(const Mat6d& e, double t) {
  ModeCoefficients c;
  c.t = t;
  c.f = {e[0][0], e[0][1], -e[0][2], -e[0][3], -e[0][4], -e[0][5]};
  c.g = {e[2][2], e[2][3], -e[2][0], -e[2][1], -e[2][4], -e[2][5]};
  c.h = {e[4][4], e[4][5], e[4][2], e[4][3], e[4][0], e[4][1]};
  return c;
}

double IdentityReport::max_abs() const {
  double m = 0.0;
  for (double v : values()) m = std::max(m, std::abs(v));
  return m;
}

std::array<double, 9> IdentityReport::values() const {
  return {norm_1,   norm_2,       norm_3,   cross_12,     cross_12_dag,
          cross_13, cross_13_dag, cross_23, cross_23_dag};
}

std::array<const char*, 9> IdentityReport::names() {
  return {"norm_1",   "norm_2",       "norm_3",   "cross_12",     "cross_12_dag",
          "cross_13", "cross_13_dag", "cross_23", "cross_23_dag"};
}

ModeCoefficients general_coefficients(const CouplingParams& p, double t) {
  p.validate();
  require_finite_time(t);
  const Mat6<long double> e = transfer_matrix<long double>(p, t);
  ModeCoefficients c = extract_from(e, t);
  if (p.lambda2 == p.lambda3) {
    c.kbar_sq = 2.0 * p.lambda2 * p.lambda2 - 0.25 * p.lambda1 * p.lambda1;
  }
  return c;
}

ModeCoefficients special_case_coefficients(const CouplingParams& p, double t) {
  p.validate();
  require_finite_time(t);
  if (p.lambda2 != p.lambda3) {
    throw std::domain_error("equal-converter closed form requires lambda2 == lambda3");
  }
  const long double l1 = p.lambda1;
  const long double lam = p.lambda2;
  const long double kbar_sq = 2.0L * lam * lam - 0.25L * l1 * l1;
  const long double y = kbar_sq * static_cast<long double>(t) * static_cast<long double>(t);

  // c = cos(kbar t) continued to cosh for kbar_sq < 0; s = sin(kbar t)/kbar.
  long double cb, sb;
  if (y > 1e-8L) {
    const long double k = std::sqrt(kbar_sq);
    cb = std::cos(k * t);
    sb = std::sin(k * t) / k;
  } else if (y < -1e-8L) {
    const long double k = std::sqrt(-kbar_sq);
    cb = std::cosh(k * t);
    sb = std::sinh(k * t) / k;
  } else {
    cb = 1.0L - y / 2.0L + y * y / 24.0L;
    sb = t * (1.0L - y / 6.0L + y * y / 120.0L);
  }

  const long double half = 0.5L * l1 * t;
  const long double c2 = std::cosh(half);
  const long double s2 = std::sinh(half);
  const long double c1 = std::cosh(l1 * t);
  const long double s1 = std::sinh(l1 * t);
  const long double hh = 0.5L * l1;

  const long double P = c2 * cb + hh * sb * s2;
  const long double Q = s2 * cb + hh * sb * c2;
  const long double conv = lam * sb;

  ModeCoefficients c;
  c.t = t;
  c.kbar_sq = static_cast<double>(kbar_sq);
  c.f[0] = static_cast<double>(0.5L * (P + c1));
  c.f[2] = static_cast<double>(-0.5L * (P - c1));
  c.f[1] = static_cast<double>(-0.5L * (Q - s1));
  c.f[3] = static_cast<double>(0.5L * (Q + s1));
  c.f[4] = static_cast<double>(conv * c2);
  c.f[5] = static_cast<double>(-conv * s2);
  c.g = c.f;
  c.h[0] = static_cast<double>(c2 * cb - hh * sb * s2);
  c.h[1] = static_cast<double>(-s2 * cb + hh * sb * c2);
  c.h[2] = static_cast<double>(conv * c2);
  c.h[3] = static_cast<double>(-conv * s2);
  c.h[4] = c.h[2];
  c.h[5] = c.h[3];
  return c;
}

ModeCoefficients compose(const ModeCoefficients& later, const ModeCoefficients& earlier) {
  const Mat6d a = later.matrix();
  const Mat6d b = earlier.matrix();
  Mat6d e{};
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 6; ++j) e[i][j] += aik * b[k][j];
    }
  return ModeCoefficients::from_matrix(e, later.t + earlier.t);
}

ModeCoefficients swap_transform(const ModeCoefficients& coeffs, int target_mode) {
  ModeCoefficients out = coeffs;
  const auto& f = coeffs.f;
  const auto& g = coeffs.g;
  const auto& h = coeffs.h;
  switch (target_mode) {
    case 1:
      return out;
    case 2:
      out.f = g;
      out.g = f;
      out.h = {h[0], h[1], h[4], h[5], h[2], h[3]};
      return out;
    case 3:
      out.f = {h[0], h[1], -h[2], -h[3], -h[4], -h[5]};
      out.g = {g[0], g[1], g[4], g[5], g[2], g[3]};
      out.h = {f[0], f[1], -f[2], -f[3], -f[4], -f[5]};
      return out;
    default:
      throw std::invalid_argument("mode index must be 1, 2, or 3");
  }
}

IdentityReport verify_identities(const ModeCoefficients& coeffs) {
  const Mat6d e = coeffs.matrix();
  // R[i][j] = sum_k (E[i][2k] E[j][2k+1] - E[i][2k+1] E[j][2k]) - J[i][j],
  // accumulated with exact products so the result reflects the stored values.
  const auto residual = [&](int i, int j) {
    Neumaier acc;
    for (int k = 0; k < 3; ++k) {
      const auto [p1, e1] = two_prod(e[i][2 * k], e[j][2 * k + 1]);
      const auto [p2, e2] = two_prod(-e[i][2 * k + 1], e[j][2 * k]);
      acc.add(p1);
      acc.add(e1);
      acc.add(p2);
      acc.add(e2);
    }
    acc.add(-metricJ(i, j));
    return acc.value();
  };
  IdentityReport r;
  r.norm_1 = residual(0, 1);
  r.norm_2 = residual(2, 3);
  r.norm_3 = residual(4, 5);
  r.cross_12 = residual(0, 2);
  r.cross_12_dag = residual(0, 3);
  r.cross_13 = residual(0, 4);
  r.cross_13_dag = residual(0, 5);
  r.cross_23 = residual(2, 4);
  r.cross_23_dag = residual(2, 5);
  return r;
}

IdentityReport identity_residuals(const CouplingParams& p, double t) {
  p.validate();
  require_finite_time(t);
#ifdef __SIZEOF_FLOAT128__
  using Quad = __float128;
#else
  using Quad = long double;
#endif
  const Mat6<Quad> e = transfer_matrix<Quad>(p, t);
  const auto residual = [&](int i, int j) {
    Quad acc = Quad(0);
    for (int k = 0; k < 3; ++k) {
      acc += e[i][2 * k] * e[j][2 * k + 1] - e[i][2 * k + 1] * e[j][2 * k];
    }
    acc -= Quad(metricJ(i, j));
    return static_cast<double>(acc);
  };
  IdentityReport r;
  r.norm_1 = residual(0, 1);
  r.norm_2 = residual(2, 3);
  r.norm_3 = residual(4, 5);
  r.cross_12 = residual(0, 2);
  r.cross_12_dag = residual(0, 3);
  r.cross_13 = residual(0, 4);
  r.cross_13_dag = residual(0, 5);
  r.cross_23 = residual(2, 4);
  r.cross_23_dag = residual(2, 5);
  return r;
}

}  // namespace triosc
