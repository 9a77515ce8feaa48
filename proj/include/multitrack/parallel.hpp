#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace multitrack {

// Procedure: parallel_for
//
// Runs body(k) for k in [0, count) on up to `workers` threads and joins
// before returning. Each k is executed exactly once; results must be written
// to per-index slots. The first exception thrown by a body is rethrown.
template <typename F>
void parallel_for(std::size_t count, std::size_t workers, F&& body) {

  workers = std::max<std::size_t>(1, std::min(workers, count));

  if(workers == 1) {
    for(std::size_t k = 0; k < count; ++k) body(k);
    return;
  }

  std::atomic<std::size_t> next {0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto drain = [&]() {
    for(std::size_t k; (k = next.fetch_add(1)) < count; ) {
      try {
        body(k);
      }
      catch(...) {
        std::scoped_lock lock(error_mutex);
        if(!error) error = std::current_exception();
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for(std::size_t w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  pool.clear();

  if(error) std::rethrow_exception(error);
}

}  // end of namespace multitrack -------------------------------------------
