#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace netinf {

/// Sets the worker count for internal loops. 0 keeps the runtime default.
inline void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace netinf
