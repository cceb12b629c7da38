#pragma once

#include <array>
#include <vector>

#include "normcraft/normal_map.hpp"

namespace normcraft {

struct MetricReport {
    double mae_deg = 0.0;
    double ssim = 0.0;
    long n_pixels = 0;
    std::array<double, 3> per_channel_ssim{0.0, 0.0, 0.0};
};

struct RotSimilarityReport {
    double theta_bar_deg = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

struct RotSimilarityField {
    int width = 0;
    int height = 0;
    std::vector<double> theta_deg, l1, l2, linf;  // per pixel, 0 where invalid
    std::vector<unsigned char> mask;
    RotSimilarityReport mean;
};

// Mean angular error in degrees over the mask intersection:
// mean of arccos(clamp(a.b, -1, 1)). Throws EmptyOverlap.
double mae(const NormalMap& a, const NormalMap& b);

// Channel-wise SSIM with c1 = 0.01, c2 = 0.03, computed per pixel over an
// 11x11 Gaussian window (sigma 1.5, renormalized over the valid footprint)
// and averaged over the mask intersection; the headline value is the mean of
// the three channels, clamped to [0,1]. Also fills mae_deg and n_pixels.
MetricReport ssim(const NormalMap& a, const NormalMap& b);

// Window statistics of the per-pixel rotation field of a shape component:
// theta is the rotation angle between the center rotation and each window
// member, the l_p values are norms of R_center . R_member^T - I
// (l1 = max column sum, linf = max row sum, l2 = spectral norm, which for a
// rotation difference equals 2 sin(theta/2)).
RotSimilarityField rotation_similarity(const NormalMap& shape, int w);

// Per-pixel trace of the covariance of the normals in the (2w+1)^2 valid
// window; 0 at invalid pixels.
std::vector<double> local_variance_field(const NormalMap& n, int w);

}  // namespace normcraft
