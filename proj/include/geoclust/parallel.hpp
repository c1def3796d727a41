#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace geoclust {

// Thread budget: GEOCLUST_THREADS when set (clamped to [1, 256]), otherwise
// the hardware concurrency. Read on every call so tests can vary it.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("GEOCLUST_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs fn(i) for i in [0, n) over contiguous chunks. Each index must write
// only to its own output slot, which keeps results independent of the thread
// count. If bodies throw, the exception from the smallest index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t threads =
      std::min<std::size_t>(thread_budget(), n == 0 ? 1 : n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_index(threads,
                                       std::numeric_limits<std::size_t>::max());
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
          error_index[t] = i;
          return;
        }
      }
    });
  }
  for (auto& w : workers) w.join();

  std::size_t first = std::numeric_limits<std::size_t>::max();
  std::exception_ptr what;
  for (std::size_t t = 0; t < threads; ++t) {
    if (errors[t] && error_index[t] < first) {
      first = error_index[t];
      what = errors[t];
    }
  }
  if (what) std::rethrow_exception(what);
}

}  // namespace geoclust
