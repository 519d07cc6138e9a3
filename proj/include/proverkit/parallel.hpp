#pragma once

// Minimal fork/join helper: run fn(i) for i in [0, n) on up to `parallelism`
// worker threads. The first exception thrown by any worker is rethrown on the
// calling thread after all workers have joined.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace proverkit {

template <typename Fn>
void parallel_for(std::size_t n, int parallelism, Fn&& fn) {
  if (n == 0) return;
  if (parallelism <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lk(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace proverkit
