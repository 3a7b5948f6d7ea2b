#pragma once

// Deterministic data parallelism: work is split over indices, every result is
// written to its own slot, and reductions run afterwards with a fixed tree
// shape, so outputs never depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace gpscatter {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};
  return cap;
}
}  // namespace detail

/// Upper bound on worker threads. 0 means "consult GPSCATTER_THREADS, else
/// hardware concurrency".
inline void set_max_threads(int n) { detail::thread_cap() = std::max(0, n); }

inline int max_threads() {
  int cap = detail::thread_cap();
  if (cap > 0) return cap;
  if (const char* env = std::getenv("GPSCATTER_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n). Exceptions from workers are rethrown (the one
/// from the lowest index wins, so the error message is reproducible).
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(max_threads()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next++;
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  pool.clear();
  if (err) std::rethrow_exception(err);
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

/// Pairwise summation with a topology that depends only on the length.
template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.empty()) return T{};
  if (v.size() <= 8) {
    T acc = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

}  // namespace gpscatter
