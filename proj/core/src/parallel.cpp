#include "maxshape/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace maxshape {

namespace {
std::unique_ptr<tbb::global_control> g_control;
}

void set_num_threads(int n)
{
    g_control.reset();
    if (n > 0)
        g_control = std::make_unique<tbb::global_control>(
            tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(n));
}

int configure_threads_from_env()
{
    const char* s = std::getenv("MAXSHAPE_THREADS");
    if (!s || !*s) return 0;
    const int n = std::stoi(s);
    set_num_threads(n);
    return n;
}

void parallel_for(int n, const std::function<void(int, int)>& body)
{
    tbb::parallel_for(tbb::blocked_range<int>(0, n),
                      [&](const tbb::blocked_range<int>& r) { body(r.begin(), r.end()); });
}

}  // namespace maxshape
