#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace obw {

/// Process-wide worker count for parallel_for; 0 means hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Runs f(i) for i in [0, count) on a small pool. Callers write results into
/// preallocated slots indexed by i, so reduction order is deterministic.
template <class F>
void parallel_for(long count, F&& f) {
  const int workers = static_cast<int>(std::min<long>(thread_count(), count));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace obw
