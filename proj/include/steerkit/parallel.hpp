#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace steerkit {

// Worker count: STEERKIT_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; results
// must be written to per-index slots so the outcome does not depend on the
// number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Independent 64-bit seed for stream `index` derived from `seed` (splitmix64).
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace steerkit
