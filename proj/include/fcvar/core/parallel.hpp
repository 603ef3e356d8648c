#pragma once

#include <atomic>
#include <cstddef>
#include <exception>

namespace fcvar::core {

/// Global thread cap. 0 = use the OpenMP default, 1 = serial reference path.
void set_max_threads(int n);
int max_threads();

/// Number of threads a parallel region would actually use right now.
int effective_threads();

/// Data-parallel loop over [0, n). The body must only write to its own slots:
/// no shared mutable state, no floating-point reductions inside the loop.
/// Results are then bit-identical no matter how many threads run the loop,
/// and the threads==1 path is a plain serial for loop.
template <typename F>
void parallel_for(std::ptrdiff_t n, F&& body);

namespace detail {
bool use_parallel(std::ptrdiff_t n);
}

}  // namespace fcvar::core

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fcvar::core {

template <typename F>
void parallel_for(std::ptrdiff_t n, F&& body) {
#ifdef _OPENMP
    if (detail::use_parallel(n)) {
        const int nthreads = effective_threads();
        // exceptions must not unwind out of the omp region; capture the first
        // one and rethrow after the loop
        std::exception_ptr first_error = nullptr;
        std::atomic<bool> have_error{false};
#pragma omp parallel for schedule(static) num_threads(nthreads)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            if (have_error.load(std::memory_order_relaxed)) continue;
            try {
                body(i);
            } catch (...) {
                bool expected = false;
                if (have_error.compare_exchange_strong(expected, true)) {
                    first_error = std::current_exception();
                }
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        body(i);
    }
}

}  // namespace fcvar::core
