#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hgarden {

inline unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n) over contiguous blocks. fn must only write to slot i of
// its outputs; the caller reduces in index order afterwards.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  unsigned w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned k = 0; k < w; ++k) {
    std::size_t lo = n * k / w, hi = n * (k + 1) / w;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hgarden
