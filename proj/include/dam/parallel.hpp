#pragma once

#include <cstddef>
#include <functional>

namespace dam {

/// Number of worker threads to use for a request of `threads` (0 = all cores).
unsigned resolve_threads(unsigned threads);

/// Calls body(i) for i in [0, n) on up to `threads` workers. Work items are
/// handed out dynamically; body must write only to slot i of its outputs.
/// The first exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace dam
