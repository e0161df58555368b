#pragma once

#include <cstddef>
#include <functional>

namespace sosfejer {

/// Worker count: SOSFEJER_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned worker_count();

/// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on each,
/// one chunk per worker. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace sosfejer
