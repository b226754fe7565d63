#pragma once

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lbd {

/// Number of worker slots to use when the caller passes jobs <= 0.
inline int default_jobs() {
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

/// Run f(i) for i in [0, n). jobs == 1 is the plain serial loop; jobs > 1
/// fans out with OpenMP. Work items must be independent and write only to
/// their own output slots, so the result is identical for any jobs value.
template <class F>
void parallel_for(int n, int jobs, F&& f) {
  if (jobs <= 0) jobs = default_jobs();
  if (jobs == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int i = 0; i < n; ++i) f(i);
#else
  for (int i = 0; i < n; ++i) f(i);
#endif
}

}  // namespace lbd
