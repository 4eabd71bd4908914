#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ergolab {

// Worker cap from ERGODIC_LAB_THREADS; falls back to hardware concurrency.
// Read on every call so tests can vary it within one process.
inline std::size_t worker_count() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("ERGODIC_LAB_THREADS")) {
    try {
      long v = std::stol(env);
      if (v >= 1)
        return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return hw;
}

// Splits [0, count) into contiguous chunks, one per worker. Callers must only
// write to slots owned by their index so output never depends on the split.
template <typename Fn>
void parallel_for(std::size_t count, Fn &&fn, std::size_t min_chunk = 4096) {
  std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, count / min_chunk));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi)
      break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i)
        fn(i);
    });
  }
  for (auto &t : pool)
    t.join();
}

} // namespace ergolab
