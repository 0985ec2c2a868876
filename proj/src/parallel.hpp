#pragma once

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpmvar::detail {

// Runs fn(i) for i in [0, n). Exceptions are captured and the first one is rethrown after the loop.
template <class Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
#pragma omp parallel for num_threads(threads) schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace dpmvar::detail
