#pragma once

#include "normcraft/kernel.hpp"
#include "normcraft/normal_map.hpp"

namespace normcraft {

struct Decomposition {
    NormalMap shape;
    NormalMap detail;
    Kernel kernel;  // provenance
};

// Shape component: masked, weight-renormalized low-pass filter followed by
// per-pixel renormalization to unit length. Border and mask handling use
// normalized convolution: weights are rescaled over the valid in-bounds
// footprint.
NormalMap shape_component(const NormalMap& n, const Kernel& k);

// Detail component: each valid normal expressed in the frame whose z-axis is
// the local shape normal, delta(r,c) = R|shape(r,c)->z . n(r,c).
NormalMap detail_component(const NormalMap& n, const NormalMap& shape);

Decomposition decompose(const NormalMap& n, const Kernel& k);

// Exact inverse of detail extraction: n(r,c) = R|z->shape(r,c) . delta(r,c).
NormalMap recompose(const NormalMap& shape, const NormalMap& detail);
NormalMap recompose(const Decomposition& d);

// k-th order detail: order 1 is the detail component, order j the detail
// component of the order j-1 map, extracted with the same kernel each time.
NormalMap detail_order_k(const NormalMap& n, const Kernel& k, int order);

}  // namespace normcraft
