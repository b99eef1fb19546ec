#include "triosc/moments.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace triosc {

namespace {

void validate_word(const LadderWord& word) {
  if (static_cast<int>(word.size()) > kMaxWordLength) {
    throw std::invalid_argument("operator word exceeds supported length");
  }
  for (const Letter& l : word) {
    if (l.mode < 1 || l.mode > 3) throw std::invalid_argument("mode index must be 1, 2, or 3");
  }
}

// Normally ordered expectation of a single-mode word given as dagger bits,
// most significant bit first. Uses a^dag^r a^s moments, diagonal in r == s.
double subword_expectation(std::uint32_t bits, int len, StateKind kind, double occupation) {
  // rep maps (r, s) -> integer coefficient of a^dag^r a^s.
  std::unordered_map<std::uint32_t, std::int64_t> rep;
  rep.emplace(0u, 1);
  const auto key = [](int r, int s) {
    return static_cast<std::uint32_t>(r) << 8 | static_cast<std::uint32_t>(s);
  };
  for (int j = len - 1; j >= 0; --j) {
    const bool dagger = (bits >> j) & 1u;
    std::unordered_map<std::uint32_t, std::int64_t> next;
    next.reserve(rep.size() * 2);
    for (const auto& [k, coeff] : rep) {
      const int r = static_cast<int>(k >> 8);
      const int s = static_cast<int>(k & 0xffu);
      if (!dagger) {
        next[key(r, s + 1)] += coeff;
      } else {
        next[key(r + 1, s)] += coeff;
        if (s > 0) next[key(r, s - 1)] += coeff * s;
      }
    }
    rep = std::move(next);
  }
  double total = 0.0;
  for (const auto& [k, coeff] : rep) {
    const int r = static_cast<int>(k >> 8);
    const int s = static_cast<int>(k & 0xffu);
    if (r != s || coeff == 0) continue;
    total += static_cast<double>(coeff) * single_mode_expectation(r, kind, occupation);
  }
  return total;
}

struct Expansion {
  // weight[choice] for choice = 2*k + b: operator a_k (b=0) or a_k^dag (b=1).
  std::array<double, 6> weight{};
};

Expansion expansion_for(const ModeCoefficients& coeffs, const Letter& l) {
  const LinearForm row = coeffs.row(l.mode);
  Expansion e;
  for (int k = 0; k < 3; ++k) {
    if (!l.dagger) {
      e.weight[2 * k] = row.c[k];
      e.weight[2 * k + 1] = row.d[k];
    } else {
      // Real coefficients: conjugation swaps the roles of a and a^dag.
      e.weight[2 * k] = row.d[k];
      e.weight[2 * k + 1] = row.c[k];
    }
  }
  return e;
}

}  // namespace

void InitialState::validate() const {
  for (double n : occupations) {
    if (!std::isfinite(n) || n < 0.0) {
      throw std::invalid_argument("occupation must be finite and non-negative");
    }
    if (kind == StateKind::fock && n != std::floor(n)) {
      throw std::invalid_argument("Fock occupation must be an integer");
    }
  }
}

double single_mode_expectation(int daggers, StateKind kind, double occupation) {
  if (daggers < 0) throw std::invalid_argument("operator count must be non-negative");
  if (daggers == 0) return 1.0;
  if (kind == StateKind::fock) {
    const double n = occupation;
    if (daggers > n) return 0.0;
    double prod = 1.0;
    for (int i = 0; i < daggers; ++i) prod *= n - i;
    return prod;
  }
  double prod = 1.0;
  for (int i = 1; i <= daggers; ++i) prod *= i * occupation;
  return prod;
}

std::complex<double> multimode_moment(const ModeCoefficients& coeffs,
                                      const InitialState& state, const LadderWord& word) {
  state.validate();
  validate_word(word);
  const int len = static_cast<int>(word.size());
  if (len == 0) return {1.0, 0.0};

  std::vector<Expansion> exps;
  exps.reserve(word.size());
  for (const Letter& l : word) exps.push_back(expansion_for(coeffs, l));

  // Memo of single-mode subword expectations keyed by (mode, len, bits).
  std::unordered_map<std::uint32_t, double> memo;
  const auto subword = [&](int k, int sublen, std::uint32_t bits) {
    const std::uint32_t key = static_cast<std::uint32_t>(k) << 16 |
                              static_cast<std::uint32_t>(sublen) << 8 | bits;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const double v = subword_expectation(bits, sublen, state.kind, state.occupations[k]);
    memo.emplace(key, v);
    return v;
  };

  std::array<std::uint32_t, 3> bits{};
  std::array<int, 3> sublen{};
  double total = 0.0;
  const auto descend = [&](const auto& self, int pos, double w) -> void {
    if (pos == len) {
      double term = w;
      for (int k = 0; k < 3; ++k) {
        if (sublen[k] == 0) continue;
        term *= subword(k, sublen[k], bits[k]);
        if (term == 0.0) return;
      }
      total += term;
      return;
    }
    const Expansion& e = exps[pos];
    for (int choice = 0; choice < 6; ++choice) {
      const double wc = e.weight[choice];
      if (wc == 0.0) continue;
      const int k = choice / 2;
      const std::uint32_t b = choice & 1u;
      bits[k] = bits[k] << 1 | b;
      ++sublen[k];
      self(self, pos + 1, w * wc);
      --sublen[k];
      bits[k] >>= 1;
    }
  };
  descend(descend, 0, 1.0);
  return {total, 0.0};
}

MomentFn moment_function(const ModeCoefficients& coeffs, const InitialState& state) {
  return [coeffs, state](const LadderWord& word) {
    return multimode_moment(coeffs, state, word);
  };
}

double mean_photon_closed_form(const ModeCoefficients& coeffs, const InitialState& state,
                               int mode) {
  state.validate();
  const LinearForm row = coeffs.row(mode);
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double n = state.occupations[k];
    total += row.c[k] * row.c[k] * n + row.d[k] * row.d[k] * (n + 1.0);
  }
  return total;
}

double mean_photon_number(const ModeCoefficients& coeffs, const InitialState& state,
                          int mode) {
  const LadderWord word{{mode, true}, {mode, false}};
  const double engine = multimode_moment(coeffs, state, word).real();
  const double closed = mean_photon_closed_form(coeffs, state, mode);
  if (std::abs(engine - closed) > 1e-10 * std::max(1.0, std::abs(closed))) {
    throw std::logic_error("mean photon number disagrees with its closed form");
  }
  return engine;
}

double quartic_moment_mode1_closed_form(const ModeCoefficients& coeffs,
                                        const InitialState& state) {
  state.validate();
  if (state.kind != StateKind::fock) {
    throw std::domain_error("quartic closed form applies to Fock initial states");
  }
  const auto& f = coeffs.f;
  const auto& n = state.occupations;
  double diagonal = 0.0;
  double pair_sum = 0.0;
  std::array<double, 3> u{};
  for (int j = 0; j < 3; ++j) {
    const double fo = f[2 * j];      // odd-index coefficient, pairs with a
    const double fe = f[2 * j + 1];  // even-index coefficient, pairs with a^dag
    diagonal += fo * fo * fo * fo * n[j] * (n[j] - 1.0) +
                fe * fe * fe * fe * (n[j] + 1.0) * (n[j] + 2.0);
    pair_sum += fo * fe * (2.0 * n[j] + 1.0);
    u[j] = fo * fo * n[j] + fe * fe * (n[j] + 1.0);
  }
  double cross = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k) cross += u[j] * u[k];
  return diagonal + pair_sum * pair_sum + 4.0 * cross;
}

}  // namespace triosc
