#include "fcvar/core/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fcvar::core {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() { return g_max_threads.load(); }

int effective_threads() {
    int cap = g_max_threads.load();
#ifdef _OPENMP
    int hw = omp_get_max_threads();
    if (cap == 0 || cap > hw) return hw;
    return cap;
#else
    (void)cap;
    return 1;
#endif
}

namespace detail {
bool use_parallel(std::ptrdiff_t n) {
    if (n < 2) return false;
#ifdef _OPENMP
    if (omp_in_parallel()) return false;  // no nested regions
    return effective_threads() > 1;
#else
    return false;
#endif
}
}  // namespace detail

}  // namespace fcvar::core
