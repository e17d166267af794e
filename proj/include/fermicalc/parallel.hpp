#pragma once

// Minimal worker pool: index-parallel map whose results are collected by index,
// so reductions stay deterministic regardless of the thread count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fermicalc {

/// Worker count from FERMICALC_THREADS (default 1; 0 means all hardware threads).
inline unsigned worker_count() {
  const char* env = std::getenv("FERMICALC_THREADS");
  if (!env || !*env) return 1;
  try {
    const long n = std::stol(env);
    if (n <= 0) return std::max(1U, std::thread::hardware_concurrency());
    return static_cast<unsigned>(n);
  } catch (...) {
    return 1;
  }
}

/// Calls f(i) for i in [0, n); exceptions are rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned workers = worker_count()) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <class R, class F>
std::vector<R> parallel_map(std::size_t n, F&& f, unsigned workers = worker_count()) {
  std::vector<R> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); }, workers);
  return out;
}

}  // namespace fermicalc
