#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace covlab {

/// Number of worker threads: COVLAB_THREADS if set and positive, otherwise hardware concurrency.
std::size_t worker_count();

/// Runs task(i) for i in [0, n). Each task must write only to its own output slot,
/// so results do not depend on the thread count. The exception raised by the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

/// Deterministic sub-seed derivation (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace covlab
