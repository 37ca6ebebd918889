#pragma once

#include <functional>

namespace wlsm {

// Process-wide worker count used by parallel_for; 0 or 1 means serial.
void set_thread_count(int n);
int thread_count();

// Calls body(i) for i in [0, n). Each index is visited exactly once, so bodies
// that write only slot i produce results independent of the thread count.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace wlsm
