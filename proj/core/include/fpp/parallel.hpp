#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fpp/error.hpp"

namespace fpp {

/// 0 means one worker per hardware thread.
inline unsigned resolve_workers(unsigned requested) noexcept {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(i) for i in [0, n) on a pool of workers. Indices are handed out
/// in increasing order; after a failure at index f no index above f starts,
/// while every index below f still runs. The exception of the smallest
/// failing index is rethrown, so the outcome does not depend on scheduling.
/// BudgetExceeded is rethrown with the number of completed tasks appended.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{kNone};
  std::mutex mutex;
  std::exception_ptr failure;

  auto loop = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n || i > first_failure.load(std::memory_order_acquire)) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (i < first_failure.load(std::memory_order_relaxed)) {
          first_failure.store(i, std::memory_order_release);
          failure = std::current_exception();
        }
      }
    }
  };

  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n));
  if (count <= 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
  }

  if (!failure) return;
  const std::size_t failed_at = first_failure.load();
  try {
    std::rethrow_exception(failure);
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded(std::string(e.what()) + " (" + std::to_string(failed_at) + " of " +
                             std::to_string(n) + " tasks completed)",
                         e.budget(), e.progress());
  }
}

/// out[i] = fn(i), computed with parallel_for.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace fpp
