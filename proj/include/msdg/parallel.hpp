#pragma once

#include <functional>

namespace msdg {

// Runs fn(0..n-1) on up to `threads` workers over contiguous index ranges.
// threads <= 1 runs inline. Work items must be independent; results keyed by
// index stay deterministic for any thread count. The first exception thrown
// by a worker is rethrown after all workers joined.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// 0 means "pick": the hardware concurrency, capped to the item count.
int resolve_threads(int requested, int items);

}  // namespace msdg
