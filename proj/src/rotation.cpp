#include "normcraft/rotation.hpp"

#include <string>

#include "normcraft/errors.hpp"
#include "normcraft/normal_map.hpp"

namespace normcraft {

Rotation3 rotation_to_z(const Vec3& n) {
    if (n.z <= -1.0 + kPoleEps)
        throw PoleSingularity("rotation_to_z: direction too close to -z (n.z = " +
                              std::to_string(n.z) + ")");
    const double a = 1.0 / (1.0 + n.z);
    return {{1.0 - n.x * n.x * a, -n.x * n.y * a, -n.x,
             -n.x * n.y * a, 1.0 - n.y * n.y * a, -n.y,
             n.x, n.y, 1.0 - (n.x * n.x + n.y * n.y) * a}};
}

Rotation3 rotation_from_z(const Vec3& n) { return rotation_to_z(n).transposed(); }

namespace {

// I + [v]x + [v]x^2 / (1+c) with v = a x b, c = a . b; requires c > -1.
Rotation3 align(const Vec3& a, const Vec3& b) {
    const Vec3 v = a.cross(b);
    const double c = a.dot(b);
    const double k = 1.0 / (1.0 + c);
    return {{1.0 + k * (-v.z * v.z - v.y * v.y), -v.z + k * v.x * v.y, v.y + k * v.x * v.z,
             v.z + k * v.x * v.y, 1.0 + k * (-v.z * v.z - v.x * v.x), -v.x + k * v.y * v.z,
             -v.y + k * v.x * v.z, v.x + k * v.y * v.z, 1.0 + k * (-v.y * v.y - v.x * v.x)}};
}

const Rotation3 kXToZ = {{0, 0, -1, 0, 1, 0, 1, 0, 0}};

}  // namespace

Rotation3 rotation_to_z_safe(const Vec3& n) {
    if (n.z > -1.0 + kPoleEps) return rotation_to_z(n);
    // Antipodal cap: route through +x, where both legs are well conditioned
    // (|n.x| is tiny this close to -z, so 1 + n.x stays near 1).
    return kXToZ * align(n, Vec3{1.0, 0.0, 0.0});
}

Rotation3 rotation_from_z_safe(const Vec3& n) { return rotation_to_z_safe(n).transposed(); }

RotationField build_rotation_field(const NormalMap& shape) {
    RotationField f;
    f.width = shape.width();
    f.height = shape.height();
    f.rotations.assign(shape.size(), Rotation3::identity());
    f.mask = shape.mask();

    const int h = shape.height(), w = shape.width();
#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!shape.valid(r, c)) continue;
            f.rotations[shape.index(r, c)] = rotation_to_z_safe(shape.at(r, c));
        }
    }
    return f;
}

}  // namespace normcraft
