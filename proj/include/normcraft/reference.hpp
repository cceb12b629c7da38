#pragma once

#include "normcraft/kernel.hpp"
#include "normcraft/metrics.hpp"
#include "normcraft/normal_map.hpp"
#include "normcraft/rotation.hpp"

// Serial reference implementations, kept deliberately naive and written from
// the defining formulas rather than sharing code with the fast kernels. The
// tests pin the production output against these, and the benchmark target
// compares their runtimes.
namespace normcraft::reference {

// Direct windowed sum with per-pixel weight renormalization (no separable
// passes).
NormalMap shape_component(const NormalMap& n, const Kernel& k);

// Rodrigues construction from the cross/dot form
// R = I + [v]x + [v]x^2 / (1 + c), v = a x b, c = a . b,
// instead of the expanded closed-form matrix.
Rotation3 align_rotation(const Vec3& a, const Vec3& b);

NormalMap detail_component(const NormalMap& n, const NormalMap& shape);

double mae(const NormalMap& a, const NormalMap& b);

// Two-pass windowed statistics (explicit weighted central moments).
MetricReport ssim(const NormalMap& a, const NormalMap& b);

// Spectral norm via power iteration on D^T D rather than the closed-form
// rotation-angle identity.
double spectral_norm(const double d[9]);

RotSimilarityField rotation_similarity(const NormalMap& shape, int w);

// Explicit two-pass covariance trace.
std::vector<double> local_variance_field(const NormalMap& n, int w);

}  // namespace normcraft::reference
