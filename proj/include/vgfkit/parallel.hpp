#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace vgfkit {

// Thread count from VGFKIT_THREADS, defaulting to 1 (the reference mode).
inline int default_threads() {
  if (const char* env = std::getenv("VGFKIT_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
    }
  }
  return 1;
}

// Runs body(i) for i in [0, count) over contiguous chunks. The partition depends
// only on count and threads, so results written by index are reproducible.
template <class F>
void parallel_for(long count, int threads, F&& body) {
  if (count <= 0) return;
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::min<long>(count, 256))));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  const long chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        const long lo = t * chunk;
        const long hi = std::min(count, lo + chunk);
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace vgfkit
