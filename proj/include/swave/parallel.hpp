#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace swave {

/// Runs body(i) for i in [0, count) on up to `threads` workers with a static
/// round-robin assignment. Exceptions are captured per index and returned so
/// callers can report results in index order; a null entry means success.
inline std::vector<std::exception_ptr> parallel_for(std::size_t count, std::size_t threads,
                                                    const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < count; i += stride) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    run(0, 1);
    return errors;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  return errors;
}

/// Rethrows the first captured exception, if any.
inline void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace swave
