#ifndef NETLOC_DETAIL_PARALLEL_HPP_
#define NETLOC_DETAIL_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace netloc::detail {

/// Worker cap from NETLOC_THREADS, defaulting to the hardware concurrency.
inline unsigned thread_limit() {
  if (const char* env = std::getenv("NETLOC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count). Each index must write only its own output
/// slot; results are then independent of the thread count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t grain = 64) {
  const std::size_t workers =
      std::min<std::size_t>(thread_limit(), (count + grain - 1) / std::max<std::size_t>(grain, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace netloc::detail

#endif  // NETLOC_DETAIL_PARALLEL_HPP_
