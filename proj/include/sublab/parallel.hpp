#pragma once

#include <cstddef>
#include <functional>

namespace sublab {

/// Runs body(i) for i in [0, count) on up to `jobs` threads (jobs <= 0 means
/// hardware concurrency). Each index is processed exactly once; callers write
/// into per-index slots and reduce afterwards in index order. The exception of
/// the lowest failing index is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Worker count actually used for `jobs`.
[[nodiscard]] int resolve_jobs(int jobs) noexcept;

}  // namespace sublab
