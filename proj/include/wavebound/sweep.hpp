#pragma once

// Bounded worker pool for embarrassingly parallel parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace wavebound {

/// Worker count: WAVEBOUND_THREADS if set (>= 1), else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("WAVEBOUND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class T>
struct SweepOutcome {
  std::optional<T> value;
  std::string error;  // empty on success
};

/// Runs task(i) for i in [0, n) on at most `threads` workers. Results come
/// back in index order regardless of scheduling; exceptions are captured per
/// point.
template <class T, class Task>
std::vector<SweepOutcome<T>> parallel_sweep(std::size_t n, const Task& task, unsigned threads = worker_count()) {
  std::vector<SweepOutcome<T>> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i].value = task(i);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  const unsigned k = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (k <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(k);
  for (unsigned i = 0; i < k; ++i) pool.emplace_back(worker);
  pool.clear();  // joins
  return out;
}

}  // namespace wavebound
