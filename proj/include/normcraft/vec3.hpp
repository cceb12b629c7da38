#pragma once

#include <cmath>

namespace normcraft {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(squared_norm()); }

    // Caller is responsible for checking degeneracy; norm of the result is
    // within 1e-9 of 1 whenever norm() >= 1e-8.
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr Vec3 kAxisZ{0.0, 0.0, 1.0};

// Angle between two unit vectors in radians. Exact zero for bitwise-equal
// inputs (the cross product cancels exactly).
inline double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline double rad_to_deg(double rad) { return rad / 3.14159265358979323846 * 180.0; }
inline double deg_to_rad(double deg) { return deg / 180.0 * 3.14159265358979323846; }

}  // namespace normcraft
