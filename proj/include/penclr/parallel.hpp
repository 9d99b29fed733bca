#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace penclr {

// Runs task(0), ..., task(n_tasks - 1) on up to `workers` threads, claiming
// indices from a shared counter. Tasks must write only to disjoint result
// slots so the outcome is independent of the worker count. The first
// exception thrown by a task is rethrown after all threads join.
inline void parallel_for(int n_tasks, int workers,
                         const std::function<void(int)>& task) {
  if (n_tasks <= 0) return;
  workers = std::clamp(workers, 1, n_tasks);
  if (workers == 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }

  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto drain = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_tasks) return;
      try {
        task(i);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace penclr
