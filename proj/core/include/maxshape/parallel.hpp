#pragma once

#include <functional>

namespace maxshape {

// Threads used by the assembly loops; 0 restores the default.  The
// MAXSHAPE_THREADS environment variable is read by configure_threads_from_env.
void set_num_threads(int n);
int configure_threads_from_env();

void parallel_for(int n, const std::function<void(int begin, int end)>& body);

}  // namespace maxshape
