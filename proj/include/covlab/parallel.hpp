#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "covlab/random.hpp"

namespace covlab {

/// Worker count: COVLAB_THREADS if set and positive, else hardware
/// concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("COVLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Evaluates fn(r, split_stream(seed, r)) for r in [0, n) on up to `threads`
/// workers. Results land in slot r, so the output is independent of the
/// thread count and of scheduling.
template <class Fn>
auto run_replicates(std::uint64_t seed, std::size_t n, unsigned threads, Fn&& fn) {
  using Result = decltype(fn(std::size_t{}, std::declval<RandomStream&>()));
  std::vector<Result> out(n);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), n == 0 ? 1 : n));
  if (workers <= 1) {
    for (std::size_t r = 0; r < n; ++r) {
      auto rng = split_stream(seed, r);
      out[r] = fn(r, rng);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < n; r = next++) {
        try {
          auto rng = split_stream(seed, r);
          out[r] = fn(r, rng);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace covlab
