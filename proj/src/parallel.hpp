#pragma once

#include <cstddef>
#include <functional>

namespace cptquit::detail {

/// Worker count: CPTQUIT_THREADS if set to a positive integer, otherwise the
/// machine's hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Work is
/// handed out by an atomic counter, so callers must write results into
/// per-index slots to stay deterministic. The first exception is rethrown.
/// Nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cptquit::detail
