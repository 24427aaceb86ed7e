#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace vqda {

// Runs fn(i) for i in [0, n), split into contiguous chunks across worker
// threads. Each index writes only its own output slot, so results do not
// depend on the thread count; callers reduce the slots in index order.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>((std::size_t)threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace vqda
