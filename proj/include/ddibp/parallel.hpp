#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace ddibp {

// Static-partition parallel loop over [0, count). Each index writes only its
// own slot, so results are identical for any thread count.
inline void parallel_for(long long count, const std::function<void(long long)>& body,
                         int threads = 0) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  if (threads == 1 || count < 4 * threads) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (long long i = t; i < count; i += threads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ddibp
