// Minimal parallel map over path indices.

#pragma once

#include <cstddef>
#include <functional>

namespace illiq {

// Runs fn over [0, n) split into contiguous chunks, one per worker.
// Each chunk writes to disjoint output regions, so results do not
// depend on the worker count.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& fn);

// Worker-count resolution: explicit request > ILLIQ_THREADS env > 1.
unsigned resolve_threads(unsigned requested = 0);

}  // namespace illiq
