#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qstar {

/// Worker cap from QSTAR_THREADS, else hardware concurrency (at least 1).
inline unsigned thread_cap() {
  if (const char* env = std::getenv("QSTAR_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Each index writes only its own slot, so
/// results do not depend on the number of workers. The first exception (by
/// index) is rethrown.
template <class Body>
void parallel_for(size_t count, Body&& body) {
  const size_t workers = std::min<size_t>(thread_cap(), count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < count; i += workers) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace qstar
