#include "proxflow/threads.hpp"

#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace proxflow {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("PROXFLOW_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{initial_threads()};
  return cap;
}

}  // namespace

int max_threads() {
  int n = thread_cap().load(std::memory_order_relaxed);
#ifdef _OPENMP
  const int hw = omp_get_max_threads();
  if (n > hw) n = hw;
#else
  n = 1;
#endif
  return n < 1 ? 1 : n;
}

void set_max_threads(int n) { thread_cap().store(n < 1 ? 1 : n, std::memory_order_relaxed); }

}  // namespace proxflow
