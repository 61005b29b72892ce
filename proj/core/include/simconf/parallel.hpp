#pragma once

#include <cstddef>
#include <functional>

namespace simconf {

// Runs fn(0..count-1) on up to `jobs` threads. Each index owns its output
// slot, so results are identical regardless of jobs. The first exception
// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace simconf
