#pragma once

#include <cstddef>
#include <functional>

namespace muskat {

/// Worker count used by parallel sweeps. Defaults to the MUSKAT_THREADS
/// environment variable, else 1.
int thread_count();
void set_thread_count(int n);

/// Runs body(k) for k in [0, n). Work is split into contiguous static blocks,
/// so results written by index do not depend on the thread count. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace muskat
