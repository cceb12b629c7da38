// Timing comparison of the OpenMP kernels against the serial reference
// implementations. Not a correctness gate; the tests pin equivalence.

#include <chrono>
#include <cstdio>
#include <functional>

#include "normcraft/decompose.hpp"
#include "normcraft/metrics.hpp"
#include "normcraft/parallel.hpp"
#include "normcraft/reference.hpp"

#include "../tests/fixtures.hpp"

using namespace normcraft;
using Clock = std::chrono::steady_clock;

namespace {

double time_of(const std::function<void()>& fn, int repeats = 3) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.4fs %10.4fs %8.2fx\n", name, serial, parallel,
                serial / parallel);
}

}  // namespace

int main() {
    apply_thread_env();
    std::printf("threads: %d\n", max_threads());
    std::printf("%-28s %11s %11s %9s\n", "kernel", "reference", "parallel", "speedup");

    const Kernel k = Kernel::gaussian(5);
    const NormalMap map512 = fixtures::bumpy_hemisphere(512, 512, 1.3, 1.2, 16.0);
    const NormalMap shape512 = shape_component(map512, k);

    row("shape_component 512^2",
        time_of([&] { (void)reference::shape_component(map512, k); }),
        time_of([&] { (void)shape_component(map512, k); }));

    row("detail_component 512^2",
        time_of([&] { (void)reference::detail_component(map512, shape512); }),
        time_of([&] { (void)detail_component(map512, shape512); }));

    const NormalMap other = fixtures::bump_plane(512, 512, 1.5, 16.0);
    row("ssim 512^2", time_of([&] { (void)reference::ssim(map512, other); }, 1),
        time_of([&] { (void)ssim(map512, other); }));

    const NormalMap map128 = fixtures::bumpy_hemisphere(128, 128);
    row("rotation_similarity 128^2",
        time_of([&] { (void)reference::rotation_similarity(map128, 5); }, 1),
        time_of([&] { (void)rotation_similarity(map128, 5); }));

    row("local_variance 512^2",
        time_of([&] { (void)reference::local_variance_field(map512, 5); }, 1),
        time_of([&] { (void)local_variance_field(map512, 5); }));

    return 0;
}
