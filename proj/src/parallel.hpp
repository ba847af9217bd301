#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace sdss {

/// Runs fn(i) for i in [begin, end) across at most `workers` threads with a
/// contiguous index split. Rethrows the first captured exception.
template <typename Fn>
void parallel_for_indices(std::uint64_t begin, std::uint64_t end, int workers,
                          Fn&& fn) {
  const std::uint64_t count = end > begin ? end - begin : 0;
  if (count == 0) return;
  const int n_threads =
      static_cast<int>(std::min<std::uint64_t>(std::max(workers, 1), count));
  if (n_threads == 1) {
    for (std::uint64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  const std::uint64_t chunk = (count + n_threads - 1) / n_threads;
  for (int w = 0; w < n_threads; ++w) {
    const std::uint64_t lo = begin + w * chunk;
    const std::uint64_t hi = std::min(end, lo + chunk);
    pool.emplace_back([&, w, lo, hi]() {
      try {
        for (std::uint64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace sdss
