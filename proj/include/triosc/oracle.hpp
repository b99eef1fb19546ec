#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "triosc/dynamics.hpp"
#include "triosc/moments.hpp"

namespace triosc {

inline constexpr int kMaxCutoff = 40;

// State vector over the product basis |n1, n2, n3>, all occupations <= cutoff,
// flattened as (n1 (cutoff+1) + n2)(cutoff+1) + n3.
struct TruncatedState {
  int cutoff = 0;
  std::vector<std::complex<double>> amp;
  double norm = 1.0;

  int dim() const { return (cutoff + 1) * (cutoff + 1) * (cutoff + 1); }
  int index(int n1, int n2, int n3) const {
    return (n1 * (cutoff + 1) + n2) * (cutoff + 1) + n3;
  }
  // Population with any occupation in the top two levels of the basis.
  double tail_population() const;
};

// Fock product state embedded at the given cutoff. Thermal mixtures have no
// state vector and are rejected.
TruncatedState make_state(const InitialState& state, int cutoff);

// Evolution generator on the truncated basis, compressed rows with at most six
// entries each in a fixed term order. Real antisymmetric. Distinct instances
// may be used concurrently; shared ones must not race on first dense use.
struct SparseGenerator {
  int cutoff = 0;
  CouplingParams params;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  double norm1 = 0.0;

  int dim() const { return (cutoff + 1) * (cutoff + 1) * (cutoff + 1); }
  void apply(const std::complex<double>* x, std::complex<double>* y) const;

  struct DenseCache;
  mutable std::shared_ptr<const DenseCache> dense;
};

SparseGenerator build_generator(const CouplingParams& params, int cutoff);

// Propagates by the exponential of the generator times t: spectral path for
// cutoffs up to ten, scaled Taylor action of the matrix otherwise. The norm
// after the step is stored on the result, never corrected. Throws
// TruncationError when the output tail exceeds 1e-6.
TruncatedState evolve(const TruncatedState& state, const SparseGenerator& gen, double t);

// Evolves a Fock product state, doubling the cutoff from max(8, quanta + 6)
// until the output tail drops below 1e-9 or the cutoff cap is reached.
TruncatedState evolve_auto(const CouplingParams& params, const InitialState& init,
                           double t);

// <state| word |state> with bare ladder operators, letters applied right to
// left in a basis padded by the dagger count.
std::complex<double> oracle_moment(const TruncatedState& state, const LadderWord& word);

MomentFn oracle_moment_function(const TruncatedState& state);

}  // namespace triosc
