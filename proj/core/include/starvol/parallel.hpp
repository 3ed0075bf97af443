#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace starvol {

/// Runs fn(i) for i in [0, count) on `workers` threads. Work is striped by
/// index, so results written to slot i are identical for any worker count;
/// fn must not touch shared mutable state beyond its own slot.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int w = std::min<int>(workers, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w));
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([t, w, count, &fn] {
      for (std::size_t i = static_cast<std::size_t>(t); i < count; i += static_cast<std::size_t>(w))
        fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace starvol
