#pragma once

#include <cstddef>
#include <functional>

namespace toposelect {

/// Number of hardware threads, at least 1.
int default_workers() noexcept;

/// Runs body(i) for i in [0, n) on up to `workers` threads. Every index runs
/// even if some throw; afterwards the exception of the lowest failing index is
/// rethrown. Results must be written to per-index slots by the caller, which
/// keeps the outcome independent of scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace toposelect
