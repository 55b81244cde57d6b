#pragma once

#include <cstddef>
#include <functional>

namespace lens {

/// Worker count: hardware concurrency, capped by LEFSCHETZ_LENS_THREADS
/// when that variable holds a positive integer.
unsigned worker_count() noexcept;

/// Calls body(i) for every i in [0, n). Work is split across worker_count()
/// threads; callers write results into slot i so the outcome does not depend
/// on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Same, with an explicit thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned max_workers);

}  // namespace lens
