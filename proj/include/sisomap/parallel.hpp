#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sisomap {

/// Worker count used by the data-parallel loops (graph construction, shortest
/// paths, sweep cells). 0 means hardware concurrency.
void set_thread_count(unsigned n) noexcept;
unsigned thread_count() noexcept;

/// Runs fn(i) for i in [begin, end). Iterations must be independent; the first
/// exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, Fn&& fn) {
  const std::ptrdiff_t total = end - begin;
  if (total <= 0) return;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::ptrdiff_t>(thread_count(), total));
  if (workers <= 1) {
    for (std::ptrdiff_t i = begin; i < end; ++i) fn(i);
    return;
  }

  std::atomic<std::ptrdiff_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::ptrdiff_t i = next++; i < end; i = next++) fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = end;
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sisomap
