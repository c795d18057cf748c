#include "convspectra/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace convspectra {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t default_threads() noexcept {
  if (const char* env = std::getenv("CONV_SPECTRA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::size_t thread_count() noexcept {
  const std::size_t n = g_override.load(std::memory_order_relaxed);
  return n != 0 ? n : default_threads();
}

void set_thread_count(std::size_t n) noexcept { g_override.store(n, std::memory_order_relaxed); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  // One slot per chunk; chunks are in index order, so the first non-null
  // slot holds the error of the lowest failing index.
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;

  auto run = [&](std::size_t worker, std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end; ++i) body(i);
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin < end) pool.emplace_back(run, w, begin, end);
    }
    run(0, 0, std::min(count, chunk));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace convspectra
