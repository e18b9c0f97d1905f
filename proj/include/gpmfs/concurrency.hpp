#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace gpmfs {

/// Runs fn(i) for i in [0, count) on at most `workers` threads. Each index
/// must write only its own output slot, which keeps results position-stable
/// no matter how work is scheduled. If several calls throw, the exception
/// from the lowest index is rethrown after all workers have finished.
template <typename Fn>
void parallel_for_indexed(int count, int workers, Fn&& fn) {
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> cursor{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const int thread_count = std::min(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) {
    pool.emplace_back([&] {
      for (int i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gpmfs
