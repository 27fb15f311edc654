#pragma once

#include <cstddef>
#include <functional>

namespace shapeinv {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Work items must be independent; exceptions are rethrown
/// on the caller thread. Results written by index stay deterministic.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace shapeinv
