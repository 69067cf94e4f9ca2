#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace imaxent {

inline int default_workers()
{
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

//! Runs fn(i) for i in [0, count) on `workers` threads. Tasks must write
//! only to their own per-index slots; merging is the caller's job so that
//! results never depend on scheduling. workers <= 1 runs serially.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn)
{
  if (count == 0)
    return;
  if (workers <= 0)
    workers = default_workers();
  if (workers == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }

  std::atomic<std::size_t> next{ 0 };
  std::atomic<bool> failed{ false };
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load())
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
          error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t)
    threads.emplace_back(worker);
  for (auto& t : threads)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace imaxent
