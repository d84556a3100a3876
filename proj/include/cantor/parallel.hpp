#pragma once

#include <cstddef>
#include <exception>

namespace cantor {

/// Environment variable capping worker threads; "0" or unset means auto.
inline constexpr const char* kThreadsEnvVar = "CANTOR_SPECTRA_THREADS";

/// Thread count for the OpenMP kernels: the env cap when set and positive,
/// otherwise the OpenMP default. Always 1 in builds without OpenMP.
int worker_threads();

/// Runs body(i) for i in [0, count) on the OpenMP team. Items must be
/// independent. An exception from any item is rethrown after the loop; when
/// several items throw, the one with the lowest index wins.
template <class Body>
void parallel_for(std::ptrdiff_t count, const Body& body) {
  std::exception_ptr error;
  std::ptrdiff_t error_index = count;
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(cantor_parallel_for_error)
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Serial counterpart of parallel_for with the same semantics.
template <class Body>
void serial_for(std::ptrdiff_t count, const Body& body) {
  for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
}

}  // namespace cantor
