#pragma once

#include <cstddef>
#include <functional>

namespace spherekde {

/// Upper bound on worker threads used by library loops. 0 selects the
/// number of logical processors.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Calls body(i) for i in [0, count) on up to thread_count() threads.
/// Each index is visited exactly once; callers write into index-owned
/// slots and reduce afterwards, so results do not depend on scheduling.
/// The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace spherekde
