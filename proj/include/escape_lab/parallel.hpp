#pragma once

#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace escape_lab {

// Worker budget: ESCAPE_LAB_THREADS caps parallelism, 0 or unset means auto.
inline int thread_budget() {
  const char* env = std::getenv("ESCAPE_LAB_THREADS");
  long v = 0;
  if (env != nullptr) {
    char* end = nullptr;
    v = std::strtol(env, &end, 10);
    if (end == env || v < 0) v = 0;
  }
  if (v == 0) {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }
  return static_cast<int>(v);
}

// Runs body(i) for i in [0, n). Callers must write results into per-index
// slots so the outcome is identical for every worker count.
template <class F>
void parallel_for(long n, F&& body) {
  if (n <= 0) return;
  const long workers = std::min<long>(thread_budget(), n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error = nullptr;
  std::mutex error_mu;
  for (long w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (long i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace escape_lab
