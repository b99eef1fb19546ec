#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace triosc {

// Execution policy for grid-style kernels. `seq` is the reference path;
// `par` must produce bitwise-identical results (fixed work decomposition,
// no reduction-order dependence across threads).
enum class Exec { seq, par };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Runs fn(i) for i in [0, n). Each index writes only its own output slot.
template <typename Fn>
void parallel_for(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::par) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace triosc
