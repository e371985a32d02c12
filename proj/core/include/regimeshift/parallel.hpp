#pragma once

#include <cstddef>
#include <functional>

namespace regimeshift {

/// Number of workers to use for a requested count (0 means hardware concurrency).
[[nodiscard]] unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for every i in [0, n) using up to `threads` workers and blocks
/// until all calls return. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace regimeshift
