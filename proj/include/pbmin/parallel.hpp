#pragma once

#include <cstddef>
#include <functional>

namespace pbmin {

// Worker cap: hardware concurrency clamped by the PBMIN_THREADS environment
// variable, with a floor of 1.
int thread_budget();

// Runs body(i) for every i in [0, count).  Work items must be independent and
// write only to their own output slots, so results are identical for any
// thread count.  Nested calls run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace pbmin
