#include "triosc/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "triosc/errors.hpp"

namespace triosc {

namespace {

constexpr double kInputTailLimit = 1e-8;
constexpr double kOutputTailLimit = 1e-6;
constexpr double kAutoTailTarget = 1e-9;
constexpr double kNormDriftLimit = 1e-10;
constexpr int kDenseCutoffLimit = 10;
constexpr double kTaylorStepNorm = 4.0;
constexpr int kTaylorTermCap = 64;

std::mutex cache_mutex;

int checked_cutoff(int cutoff) {
  if (cutoff < 1 || cutoff > kMaxCutoff) {
    throw std::invalid_argument("truncated basis cutoff outside [1, 40]");
  }
  return cutoff;
}

double mass(const std::vector<std::complex<double>>& amp) {
  double sum = 0.0;
  for (const auto& a : amp) sum += std::norm(a);
  return sum;
}

}  // namespace

// Spectral data of the Hermitian matrix i G; exp(G t) = V exp(-i E t) V^dag.
struct SparseGenerator::DenseCache {
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd frequencies;
};

double TruncatedState::tail_population() const {
  const int side = cutoff + 1;
  double sum = 0.0;
  for (int n1 = 0; n1 <= cutoff; ++n1) {
    for (int n2 = 0; n2 <= cutoff; ++n2) {
      for (int n3 = 0; n3 <= cutoff; ++n3) {
        if (n1 < cutoff - 1 && n2 < cutoff - 1 && n3 < cutoff - 1) continue;
        sum += std::norm(amp[(n1 * side + n2) * side + n3]);
      }
    }
  }
  return sum;
}

TruncatedState make_state(const InitialState& state, int cutoff) {
  state.validate();
  if (state.kind != StateKind::fock) {
    throw std::invalid_argument("truncated reference takes Fock product states only");
  }
  checked_cutoff(cutoff);
  TruncatedState out;
  out.cutoff = cutoff;
  out.amp.assign(out.dim(), {0.0, 0.0});
  const int n1 = static_cast<int>(state.occupations[0]);
  const int n2 = static_cast<int>(state.occupations[1]);
  const int n3 = static_cast<int>(state.occupations[2]);
  if (n1 > cutoff || n2 > cutoff || n3 > cutoff) {
    throw std::invalid_argument("initial occupation exceeds the basis cutoff");
  }
  out.amp[out.index(n1, n2, n3)] = {1.0, 0.0};
  out.norm = 1.0;
  return out;
}

void SparseGenerator::apply(const std::complex<double>* x, std::complex<double>* y) const {
  const int n = dim();
  for (int r = 0; r < n; ++r) {
    std::complex<double> acc{0.0, 0.0};
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      acc += val[k] * x[col[k]];
    }
    y[r] = acc;
  }
}

SparseGenerator build_generator(const CouplingParams& params, int cutoff) {
  params.validate();
  checked_cutoff(cutoff);
  SparseGenerator gen;
  gen.cutoff = cutoff;
  gen.params = params;
  const int side = cutoff + 1;
  const int dim = gen.dim();
  gen.row_ptr.reserve(dim + 1);
  gen.row_ptr.push_back(0);
  gen.col.reserve(static_cast<std::size_t>(dim) * 6);
  gen.val.reserve(static_cast<std::size_t>(dim) * 6);
  const double l1 = params.lambda1, l2 = params.lambda2, l3 = params.lambda3;
  double norm1 = 0.0;
  for (int n1 = 0; n1 <= cutoff; ++n1) {
    for (int n2 = 0; n2 <= cutoff; ++n2) {
      for (int n3 = 0; n3 <= cutoff; ++n3) {
        double row_sum = 0.0;
        const auto emit = [&](int c1, int c2, int c3, double v) {
          gen.col.push_back((c1 * side + c2) * side + c3);
          gen.val.push_back(v);
          row_sum += std::abs(v);
        };
        // Pair creation and annihilation between modes 1 and 2.
        if (l1 != 0.0 && n1 < cutoff && n2 < cutoff) {
          emit(n1 + 1, n2 + 1, n3, l1 * std::sqrt(double((n1 + 1) * (n2 + 1))));
        }
        if (l1 != 0.0 && n1 > 0 && n2 > 0) {
          emit(n1 - 1, n2 - 1, n3, -l1 * std::sqrt(double(n1 * n2)));
        }
        // Quantum exchange between modes 1 and 3.
        if (l2 != 0.0 && n1 < cutoff && n3 > 0) {
          emit(n1 + 1, n2, n3 - 1, l2 * std::sqrt(double((n1 + 1) * n3)));
        }
        if (l2 != 0.0 && n1 > 0 && n3 < cutoff) {
          emit(n1 - 1, n2, n3 + 1, -l2 * std::sqrt(double(n1 * (n3 + 1))));
        }
        // Quantum exchange between modes 2 and 3.
        if (l3 != 0.0 && n2 < cutoff && n3 > 0) {
          emit(n1, n2 + 1, n3 - 1, l3 * std::sqrt(double((n2 + 1) * n3)));
        }
        if (l3 != 0.0 && n2 > 0 && n3 < cutoff) {
          emit(n1, n2 - 1, n3 + 1, -l3 * std::sqrt(double(n2 * (n3 + 1))));
        }
        gen.row_ptr.push_back(static_cast<int>(gen.col.size()));
        norm1 = std::max(norm1, row_sum);
      }
    }
  }
  gen.norm1 = norm1;
  return gen;
}

namespace {

void ensure_dense(const SparseGenerator& gen) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (gen.dense) return;
  const int n = gen.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int k = gen.row_ptr[r]; k < gen.row_ptr[r + 1]; ++k) {
      h(r, gen.col[k]) = std::complex<double>(0.0, gen.val[k]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition of the truncated generator failed");
  }
  auto cache = std::make_shared<SparseGenerator::DenseCache>();
  cache->vectors = solver.eigenvectors();
  cache->frequencies = solver.eigenvalues();
  gen.dense = std::move(cache);
}

std::vector<std::complex<double>> propagate_dense(const SparseGenerator& gen,
                                                  const std::complex<double>* x,
                                                  double t) {
  ensure_dense(gen);
  const auto& cache = *gen.dense;
  const int n = gen.dim();
  Eigen::Map<const Eigen::VectorXcd> in(x, n);
  Eigen::VectorXcd modes = cache.vectors.adjoint() * in;
  for (int k = 0; k < n; ++k) {
    modes[k] *= std::exp(std::complex<double>(0.0, -cache.frequencies[k] * t));
  }
  Eigen::VectorXcd out = cache.vectors * modes;
  return {out.data(), out.data() + n};
}

std::vector<std::complex<double>> propagate_taylor(const SparseGenerator& gen,
                                                   const std::complex<double>* x,
                                                   double t) {
  const int n = gen.dim();
  std::vector<std::complex<double>> acc(x, x + n);
  std::vector<std::complex<double>> term(acc);
  std::vector<std::complex<double>> next(n);
  const int steps = std::max(1, static_cast<int>(std::ceil(gen.norm1 * std::abs(t) /
                                                           kTaylorStepNorm)));
  const double dt = t / steps;
  for (int s = 0; s < steps; ++s) {
    term = acc;
    double acc_max = 0.0;
    for (const auto& a : acc) acc_max = std::max(acc_max, std::abs(a));
    for (int k = 1; k <= kTaylorTermCap; ++k) {
      gen.apply(term.data(), next.data());
      const double scale = dt / k;
      double term_max = 0.0;
      for (int i = 0; i < n; ++i) {
        term[i] = scale * next[i];
        acc[i] += term[i];
        term_max = std::max(term_max, std::abs(term[i]));
      }
      if (term_max <= 1e-18 * acc_max) break;
    }
  }
  return acc;
}

}  // namespace

TruncatedState evolve(const TruncatedState& state, const SparseGenerator& gen, double t) {
  if (state.cutoff != gen.cutoff) {
    throw std::invalid_argument("state and generator cutoffs differ");
  }
  if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
  if (state.tail_population() > kInputTailLimit) {
    throw std::invalid_argument("input state already occupies the basis tail");
  }
  TruncatedState out;
  out.cutoff = state.cutoff;
  if (t == 0.0) {
    out.amp = state.amp;
  } else if (state.cutoff <= kDenseCutoffLimit) {
    out.amp = propagate_dense(gen, state.amp.data(), t);
  } else {
    out.amp = propagate_taylor(gen, state.amp.data(), t);
  }
  out.norm = std::sqrt(mass(out.amp));
  if (std::abs(out.norm - state.norm) > kNormDriftLimit * std::max(1.0, state.norm)) {
    throw std::runtime_error("propagation drifted off the unit sphere");
  }
  const double tail = out.tail_population();
  if (tail > kOutputTailLimit) {
    const int suggested = std::min(kMaxCutoff, 2 * state.cutoff);
    throw TruncationError("truncated basis too small for the evolved state", suggested);
  }
  return out;
}

namespace {

std::shared_ptr<const SparseGenerator> cached_generator(const CouplingParams& params,
                                                        int cutoff) {
  using Key = std::tuple<double, double, double, int>;
  static std::map<Key, std::shared_ptr<const SparseGenerator>> cache;
  const Key key{params.lambda1, params.lambda2, params.lambda3, cutoff};
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto gen = std::make_shared<const SparseGenerator>(build_generator(params, cutoff));
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache.emplace(key, std::move(gen)).first->second;
}

}  // namespace

TruncatedState evolve_auto(const CouplingParams& params, const InitialState& init,
                           double t) {
  init.validate();
  const int quanta = static_cast<int>(init.occupations[0] + init.occupations[1] +
                                      init.occupations[2]);
  int cutoff = std::max(8, quanta + 6);
  for (;;) {
    const auto gen = cached_generator(params, cutoff);
    try {
      TruncatedState out = evolve(make_state(init, cutoff), *gen, t);
      if (out.tail_population() < kAutoTailTarget || cutoff >= kMaxCutoff) return out;
    } catch (const TruncationError&) {
      if (cutoff >= kMaxCutoff) throw;
    }
    cutoff = std::min(kMaxCutoff, 2 * cutoff);
  }
}

std::complex<double> oracle_moment(const TruncatedState& state, const LadderWord& word) {
  if (static_cast<int>(word.size()) > kMaxWordLength) {
    throw std::invalid_argument("operator word too long");
  }
  int daggers = 0;
  for (const Letter& letter : word) {
    if (letter.mode < 1 || letter.mode > 3) {
      throw std::invalid_argument("letter mode outside {1, 2, 3}");
    }
    if (letter.dagger) ++daggers;
  }
  const int big = state.cutoff + daggers;
  const int side = big + 1;
  const auto index = [side](int n1, int n2, int n3) {
    return (n1 * side + n2) * side + n3;
  };
  const std::size_t dim = static_cast<std::size_t>(side) * side * side;
  std::vector<std::complex<double>> bra(dim, {0.0, 0.0});
  const int small_side = state.cutoff + 1;
  for (int n1 = 0; n1 <= state.cutoff; ++n1) {
    for (int n2 = 0; n2 <= state.cutoff; ++n2) {
      for (int n3 = 0; n3 <= state.cutoff; ++n3) {
        bra[index(n1, n2, n3)] = state.amp[(n1 * small_side + n2) * small_side + n3];
      }
    }
  }
  std::vector<std::complex<double>> ket(bra);
  std::vector<std::complex<double>> next(dim);
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    std::fill(next.begin(), next.end(), std::complex<double>{0.0, 0.0});
    const int m = it->mode - 1;
    for (int n1 = 0; n1 <= big; ++n1) {
      for (int n2 = 0; n2 <= big; ++n2) {
        for (int n3 = 0; n3 <= big; ++n3) {
          const std::complex<double>& a = ket[index(n1, n2, n3)];
          if (a == std::complex<double>{0.0, 0.0}) continue;
          int occ[3] = {n1, n2, n3};
          if (it->dagger) {
            if (occ[m] == big) continue;
            occ[m] += 1;
            next[index(occ[0], occ[1], occ[2])] += std::sqrt(double(occ[m])) * a;
          } else {
            if (occ[m] == 0) continue;
            const double root = std::sqrt(double(occ[m]));
            occ[m] -= 1;
            next[index(occ[0], occ[1], occ[2])] += root * a;
          }
        }
      }
    }
    ket.swap(next);
  }
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t i = 0; i < dim; ++i) sum += std::conj(bra[i]) * ket[i];
  return sum;
}

MomentFn oracle_moment_function(const TruncatedState& state) {
  auto shared = std::make_shared<const TruncatedState>(state);
  return [shared](const LadderWord& word) { return oracle_moment(*shared, word); };
}

}  // namespace triosc
