#pragma once

#include <cstddef>
#include <exception>

namespace rsirl::detail {

// Runs body(i) for i in [0, n) across OpenMP threads. An exception cannot
// cross the region boundary, so the first one is captured and rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(rsirl_parallel_for)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rsirl::detail
