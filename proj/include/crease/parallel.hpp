#ifndef CREASE_PARALLEL_HPP
#define CREASE_PARALLEL_HPP

#include <functional>

namespace crease {

/// Worker count used by parallel_for. Defaults to CREASE_THREADS or the
/// hardware concurrency.
int thread_count();

/// n <= 0 resets to the default.
void set_thread_count(int n);

/// Runs fn(begin, end) over disjoint sub-ranges of [begin, end) on worker
/// threads. Nested calls from inside a worker run serially. Results must not
/// depend on chunking: callers only write to disjoint locations.
void parallel_for(int begin, int end, const std::function<void(int, int)>& fn);

/// fn(y) per row. Chunk boundaries never split a row, so row-wise partial
/// reductions stay deterministic for any thread count.
template <class F>
void parallel_rows(int height, F&& fn) {
    parallel_for(0, height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) fn(y);
    });
}

} // namespace crease

#endif
