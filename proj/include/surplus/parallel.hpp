#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace surplus {

/// Runs fn(0), ..., fn(count-1) on a small worker pool. Items must be
/// independent; deterministic merging of their outputs is the caller's job.
/// The first exception thrown by any item is rethrown after all workers stop.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const unsigned workers = std::min<unsigned>(
      std::max(1u, std::thread::hardware_concurrency()), static_cast<unsigned>(count));
  std::exception_ptr first_error;
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_lock;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count && !failed.load(); i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> guard(error_lock);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace surplus
