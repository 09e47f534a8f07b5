#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oforge {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Kernel selector. Parallel kernels must produce output identical to their
// serial reference regardless of scheduling; the pair is kept so tests can
// compare them and the benchmark can time them.
enum class Kernel { kSerial, kParallel };

}  // namespace oforge
