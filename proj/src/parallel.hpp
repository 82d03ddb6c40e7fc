#pragma once

#include <omp.h>

#include <cstddef>
#include <exception>

namespace reflines::detail {

inline int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

/// Runs fn(i) for i in [0, n) across OpenMP threads. The first exception
/// thrown by any iteration is rethrown after the loop.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::exception_ptr failure;
  const long long count = static_cast<long long>(n);
  const int threads = thread_count(jobs);
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(reflines_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace reflines::detail
