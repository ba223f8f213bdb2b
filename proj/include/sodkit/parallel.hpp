// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sodkit {

/// Splits [0, n) into at most `jobs` contiguous ranges and runs
/// fn(begin, end, worker) on each, worker 0 on the calling thread.
/// The partition depends only on (n, jobs). The first exception thrown by
/// any worker is rethrown after all workers have joined.
template <class Fn>
void parallel_ranges(std::size_t n, unsigned jobs, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, n));
  if (workers <= 1) {
    fn(std::size_t{0}, n, 0u);
    return;
  }
  const std::size_t chunk = n / workers;
  const std::size_t extra = n % workers;
  auto bounds = [&](std::size_t w) {
    const std::size_t begin = w * chunk + std::min(w, extra);
    return std::pair{begin, begin + chunk + (w < extra ? 1 : 0)};
  };

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto guarded = [&](std::size_t w) {
    try {
      const auto [b, e] = bounds(w);
      fn(b, e, static_cast<unsigned>(w));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(guarded, w);
    guarded(0);
  }
  if (failure) std::rethrow_exception(failure);
}

/// Number of workers parallel_ranges() will actually use.
inline unsigned effective_workers(std::size_t n, unsigned jobs) {
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(jobs, n)));
}

}  // namespace sodkit
