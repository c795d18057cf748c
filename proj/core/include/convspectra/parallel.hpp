#pragma once

#include <cstddef>
#include <functional>

namespace convspectra {

/// Worker count used by batch operations. Defaults to CONV_SPECTRA_THREADS
/// when set, otherwise std::thread::hardware_concurrency().
std::size_t thread_count() noexcept;

/// Overrides the worker count; 0 restores the default.
void set_thread_count(std::size_t n) noexcept;

/// Calls body(i) for every i in [0, count). Indices are split into
/// contiguous chunks, one per worker, so each output slot is written by
/// exactly one thread and results do not depend on the worker count. After
/// all workers join, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace convspectra
