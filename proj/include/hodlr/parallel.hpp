#ifndef HODLR_PARALLEL_HPP
#define HODLR_PARALLEL_HPP

#include <cstdint>
#include <thread>
#include <vector>

namespace hodlr {

/// Static chunked parallel loop over [0, n). threads <= 1 runs inline.
/// Work items must be independent.
template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  const int t = static_cast<int>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(t);
  const std::int64_t chunk = (n + t - 1) / t;
  for (int w = 0; w < t; ++w) {
    const std::int64_t lo = w * chunk, hi = std::min<std::int64_t>(n, lo + chunk);
    pool.emplace_back([lo, hi, w, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i, w);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace hodlr

#endif
