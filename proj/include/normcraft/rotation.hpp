#pragma once

#include <vector>

#include "normcraft/vec3.hpp"

namespace normcraft {

class NormalMap;

// Directions with z at or below -1 + kPoleEps make the closed-form aligner
// singular (the 1 + n_z denominator vanishes).
inline constexpr double kPoleEps = 1e-6;

// Proper rotation, row-major 3x3.
struct Rotation3 {
    double m[9];

    static Rotation3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Rotation3 transposed() const {
        return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }

    Rotation3 operator*(const Rotation3& o) const {
        Rotation3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[3 * i + j] = m[3 * i] * o.m[j] + m[3 * i + 1] * o.m[3 + j] +
                                 m[3 * i + 2] * o.m[6 + j];
        return r;
    }

    double trace() const { return m[0] + m[4] + m[8]; }
};

// Rotation carrying the unit vector n_bar onto +z. Closed form:
//
//   [ 1 - nx^2/(1+nz)   -nx*ny/(1+nz)    -nx ]
//   [ -nx*ny/(1+nz)     1 - ny^2/(1+nz)  -ny ]
//   [ nx                ny               1 - (nx^2+ny^2)/(1+nz) ]
//
// Throws PoleSingularity when n_bar.z <= -1 + kPoleEps; callers that must
// accept the full sphere use rotation_to_z_safe instead.
Rotation3 rotation_to_z(const Vec3& n_bar);

// Inverse map: carries +z onto n_bar. Exactly the transpose of rotation_to_z.
Rotation3 rotation_from_z(const Vec3& n_bar);

// Total on the unit sphere: near -z the rotation is composed from two
// non-singular half turns (n_bar -> +x, then +x -> z).
Rotation3 rotation_to_z_safe(const Vec3& n_bar);
Rotation3 rotation_from_z_safe(const Vec3& n_bar);

// Per-pixel cache of rotation_to_z over a shape component. Invalid pixels
// hold the identity and stay masked.
struct RotationField {
    int width = 0;
    int height = 0;
    std::vector<Rotation3> rotations;
    std::vector<unsigned char> mask;

    const Rotation3& at(int r, int c) const {
        return rotations[static_cast<std::size_t>(r) * width + c];
    }
    bool valid(int r, int c) const {
        return mask[static_cast<std::size_t>(r) * width + c] != 0;
    }
};

RotationField build_rotation_field(const NormalMap& shape);

}  // namespace normcraft
