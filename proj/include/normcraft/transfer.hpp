#pragma once

#include <optional>
#include <vector>

#include "normcraft/decompose.hpp"
#include "normcraft/metrics.hpp"

namespace normcraft {

enum class Tiling { kNone, kWrap };

struct TransferRequest {
    NormalMap source_detail;  // detail component of the source surface
    NormalMap target_shape;   // smooth shape component of the target
    // Optional region (same layout as the target); must be a subset of the
    // target mask. Absent means the full target mask.
    std::optional<std::vector<std::uint8_t>> region;
    Tiling tiling = Tiling::kNone;
};

struct TransferResult {
    NormalMap output;
    double shape_mae_deg = 0.0;
    double detail_mae_deg = 0.0;
    double detail_ssim = 0.0;
};

// Global transfer: output(r,c) = R|z->target(r,c) . source_detail(r,c) inside
// the region, target pixels unchanged elsewhere. The kernel drives the
// similarity checks reported with the result: the output is re-decomposed and
// its shape is compared against the target (MAE), its detail against the
// source (MAE + SSIM), over the transferred region only.
TransferResult transfer(const TransferRequest& req, const Kernel& k);

// Region-limited transfer with a seam feather: the region itself receives the
// pure transfer; a band of b = 2w pixels just outside the region blends the
// transferred normals into the untouched target to hide the shape seam.
TransferResult local_transfer(const TransferRequest& req, const Kernel& k);

// Repeated transfer across a list of target shapes, re-extracting the detail
// after every hop. Reports per-hop MAE/SSIM of the current detail against the
// original one.
std::vector<MetricReport> transfer_roundtrip_chain(const NormalMap& detail,
                                                   const std::vector<NormalMap>& shapes,
                                                   const Kernel& k);

}  // namespace normcraft
