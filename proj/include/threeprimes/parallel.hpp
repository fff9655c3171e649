#pragma once

#include <cstddef>
#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace threeprimes {

// Worker count: set_worker_count() if called, else THREEPRIMES_WORKERS, else
// the hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t n);

// Calls fn(i) for i in [0, count) over worker_count() threads with a static
// block partition. fn must only write to per-index state; reductions happen
// afterwards in index order, which keeps results independent of thread count.
template <class F>
void parallel_for(std::size_t count, F&& fn)
{
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i)
            fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      });
    }
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace threeprimes
