#pragma once

#include <cstddef>
#include <functional>

namespace votefusion {

// Calls body(i) for i in [0, count) on up to `jobs` threads. Each index is
// handled exactly once; results written per index stay deterministic. The
// exception of the lowest failing index is rethrown after all threads join.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace votefusion
