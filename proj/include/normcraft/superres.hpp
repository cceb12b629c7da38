#pragma once

#include <string>

#include "normcraft/decompose.hpp"

namespace normcraft {

enum class ShapeUpsampler { kBicubic };
enum class DetailUpsampler { kBicubic, kExternal };

struct UpsampleSpec {
    int factor = 4;  // one of 2, 3, 4, 8
    ShapeUpsampler shape_method = ShapeUpsampler::kBicubic;
    DetailUpsampler detail_method = DetailUpsampler::kBicubic;
    std::string external_cmd;    // required for kExternal
    double timeout_sec = 300.0;  // subprocess budget
};

// Component-wise super-resolution: decompose, upsample the smooth shape with
// channel-wise bicubic interpolation, upsample the detail with the selected
// enhancer, renormalize both, and recombine on the upsampled shape. The mask
// scales by nearest neighbor.
NormalMap upsample(const NormalMap& n, const UpsampleSpec& spec, const Kernel& k);

// Whole-map channel-wise bicubic followed by renormalization. Also the
// built-in detail enhancer and the naive baseline the decomposed pipeline is
// measured against.
NormalMap bicubic_upsample(const NormalMap& n, int factor);

NormalMap nearest_upsample(const NormalMap& n, int factor);

// Box-average downsample by an integer factor (renormalized); test and CLI
// fixture helper.
NormalMap downsample_box(const NormalMap& n, int factor);

// Runs `cmd in.nrm out.nrm factor` in a child process, with the detail map
// serialized to the interchange format. Validates the output dimensions and
// renormalizes. Throws ExternalEnhancerFailed with captured diagnostics on a
// nonzero exit, bad output, or timeout.
NormalMap run_external_enhancer(const NormalMap& detail, int factor,
                                const std::string& cmd, double timeout_sec = 300.0);

}  // namespace normcraft
