#include "cantor/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cantor {

int worker_threads() {
#ifdef _OPENMP
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv(kThreadsEnvVar); env != nullptr) {
    int cap = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), cap);
    if (res.ec == std::errc() && cap > 0 && cap < threads) threads = cap;
  }
  return threads > 0 ? threads : 1;
#else
  return 1;
#endif
}

}  // namespace cantor
