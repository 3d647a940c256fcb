#pragma once

#include <cstddef>
#include <functional>

namespace grbell {

// 0 means one worker per hardware thread.
unsigned resolve_workers(unsigned requested);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index runs
// exactly once; if any call throws, the exception from the lowest index is
// rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace grbell
