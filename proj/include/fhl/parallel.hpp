#pragma once

#include <cstddef>
#include <functional>

namespace fhl {

/// Hardware concurrency, capped by the FHL_THREADS environment variable.
unsigned worker_count();

/// Calls body(begin, end) over contiguous chunks of [0, n), at most one chunk
/// per worker. Chunk boundaries depend only on n and the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Calls body(k) for k in [0, tasks), distributing tasks over workers.
void parallel_tasks(std::size_t tasks, const std::function<void(std::size_t)>& body);

}  // namespace fhl
