#include "normcraft/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace normcraft {

int max_threads() {
#ifdef _OPENMP
    int hw = omp_get_max_threads();
#else
    int hw = 1;
#endif
    if (const char* env = std::getenv("NORMCRAFT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1 && n < hw) hw = n;
    }
    return hw;
}

void apply_thread_env() {
#ifdef _OPENMP
    omp_set_num_threads(max_threads());
#endif
}

}  // namespace normcraft
