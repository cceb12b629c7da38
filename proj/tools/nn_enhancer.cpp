// Detail-enhancer stub implementing the subprocess contract:
//   nn_enhancer <in.nrm> <out.nrm> <factor>
// Nearest-neighbor upsampling; factor 1 is an identity pass-through. Stands in
// for a learned enhancer in tests and demos.
#include <cstdio>
#include <cstdlib>
#include <exception>

#include "normcraft/io.hpp"
#include "normcraft/superres.hpp"

int main(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr, "usage: nn_enhancer <in.nrm> <out.nrm> <factor>\n");
        return 1;
    }
    try {
        const int factor = std::atoi(argv[3]);
        const auto detail = normcraft::load_nrm(argv[1]);
        normcraft::save_nrm(normcraft::nearest_upsample(detail, factor), argv[2]);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "nn_enhancer: %s\n", e.what());
        return 1;
    }
    return 0;
}
