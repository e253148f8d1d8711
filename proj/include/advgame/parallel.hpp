#pragma once

#include <cstddef>
#include <functional>

namespace advgame {

/// Worker count: ADVGAME_THREADS if set, else `requested` if nonzero, else the number of cores.
std::size_t worker_count(std::size_t requested = 0);

/// Runs fn(0..count-1) on a pool. Each index runs exactly once; the first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

}  // namespace advgame
