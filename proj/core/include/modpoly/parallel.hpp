#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace modpoly {

/// Worker count used by parallel_for. Defaults to the MODPOLY_THREADS
/// environment variable if set, else the number of hardware threads.
unsigned thread_count();
/// Overrides the worker count; 0 restores the default.
void set_thread_count(unsigned count);

/// Releases per-thread MPFR caches; called by workers before they exit.
void release_thread_caches();

/// Runs fn(i) for i in [0, count). Iterations must write disjoint outputs;
/// results are then independent of the worker count. The first exception
/// thrown by any iteration is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < count && !failed; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          failed = true;
        }
        release_thread_caches();
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace modpoly
