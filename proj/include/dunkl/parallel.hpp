#pragma once

// Chunked parallel loop over independent work items. Output determinism is
// the caller's job: write results into per-index slots.

#include <functional>
#include <thread>
#include <vector>

namespace dunkl {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 4;
}

inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& run_range) {
  threads = resolve_threads(threads);
  if (n == 0) return;
  if (threads <= 1 || n < 2) {
    run_range(0, n);
    return;
  }
  std::size_t n_chunks = std::min<std::size_t>(threads, n);
  std::size_t chunk = (n + n_chunks - 1) / n_chunks;
  std::vector<std::thread> pool;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    std::size_t begin = c * chunk, end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&run_range, begin, end] { run_range(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dunkl
