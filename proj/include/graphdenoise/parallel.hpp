#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gd {

/// Worker count: hardware concurrency, capped by the GD_THREADS environment variable.
std::size_t thread_count();

/// Runs body(i) for i in [0, count) across up to thread_count() threads. Each index
/// must write only to its own outputs; the first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Counter-based seed split: a SplitMix64 mix of (master, stream) so that a task's
/// random stream does not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace gd
