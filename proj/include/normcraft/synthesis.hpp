#pragma once

#include <cstdint>

#include "normcraft/kernel.hpp"
#include "normcraft/normal_map.hpp"
#include "normcraft/transfer.hpp"

namespace normcraft {

struct SynthesisParams {
    int window = 11;              // odd, >= 3
    double err_tolerance = 0.1;   // in (0, 1]
    std::uint64_t seed = 0;
    int out_width = 0;
    int out_height = 0;
};

struct Swatch {
    NormalMap detail;       // fully valid, unit norm
    int kernel_half_width;  // provenance of the extraction
};

// Pixel-at-a-time exemplar growth on the 3-channel detail values. A random
// window-sized patch of the swatch seeds the output origin; unfilled pixels
// are grown shell by shell, each one copying the center of a swatch window
// whose Gaussian-weighted SSD against the known neighbors is within
// (1 + err_tolerance) of the best match (ties sampled uniformly from the
// seeded generator). Deterministic for a fixed (swatch, params, seed).
NormalMap synthesize_detail(const Swatch& swatch, const SynthesisParams& p);

// Grows the swatch to the target's size and transfers it onto the target
// shape, returning the transfer metrics.
TransferResult synthesize_onto(const Swatch& swatch, const NormalMap& target_shape,
                               const SynthesisParams& p, const Kernel& k);

}  // namespace normcraft
