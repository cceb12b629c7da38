#pragma once

// Procedural synthetic fixtures: planes, hemispheres, sinusoidal bump fields,
// checkerboards, and a tilt-discontinuity map. Normals follow the heightfield
// convention n ~ (-dz/dx, -dz/dy, 1) with x = column, y = row.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "normcraft/normal_map.hpp"

namespace fixtures {

using normcraft::NormalMap;
using normcraft::Vec3;

constexpr double kTau = 6.283185307179586;

inline NormalMap constant_map(int w, int h, Vec3 n = normcraft::kAxisZ) {
    return NormalMap(w, h, n.normalized(), true);
}

// Builds normals from analytic height gradients (zx, zy).
inline NormalMap from_gradients(int w, int h,
                                const std::function<void(double, double, double&, double&)>& grad) {
    NormalMap map(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double zx = 0.0, zy = 0.0;
            grad(double(c), double(r), zx, zy);
            map.at(r, c) = Vec3{-zx, -zy, 1.0}.normalized();
        }
    return map;
}

// Plane with a sinusoidal bump carpet: z = A sin(tau x / wl) sin(tau y / wl).
inline NormalMap bump_plane(int w, int h, double amplitude = 1.5, double wavelength = 16.0) {
    return from_gradients(w, h, [=](double x, double y, double& zx, double& zy) {
        const double kx = kTau / wavelength, ky = kTau / wavelength;
        zx = amplitude * kx * std::cos(kx * x) * std::sin(ky * y);
        zy = amplitude * ky * std::sin(kx * x) * std::cos(ky * y);
    });
}

// Sphere-cap normals covering the whole frame (the frame projects inside the
// sphere silhouette). radius_scale multiplies the frame half-diagonal.
inline NormalMap hemisphere_frame(int w, int h, double radius_scale = 1.3) {
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    const double R = radius_scale * std::sqrt(cx * cx + cy * cy) + 1.0;
    NormalMap map(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double x = c - cx, y = r - cy;
            const double z = std::sqrt(R * R - x * x - y * y);
            map.at(r, c) = Vec3{x / R, y / R, z / R};
        }
    return map;
}

// Analytic depth of the same cap, for integrator ground truth.
inline std::vector<double> hemisphere_frame_depth(int w, int h, double radius_scale = 1.3) {
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    const double R = radius_scale * std::sqrt(cx * cx + cy * cy) + 1.0;
    std::vector<double> z(std::size_t(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double x = c - cx, y = r - cy;
            z[std::size_t(r) * w + c] = std::sqrt(R * R - x * x - y * y);
        }
    return z;
}

inline double hemisphere_frame_radius(int w, int h, double radius_scale = 1.3) {
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    return radius_scale * std::sqrt(cx * cx + cy * cy) + 1.0;
}

// Disk-masked cap (background invalid), silhouette at disk_frac of the frame.
inline NormalMap hemisphere_disk(int size, double disk_frac = 0.45) {
    const double cx = (size - 1) / 2.0, cy = (size - 1) / 2.0;
    const double rho = disk_frac * size;
    const double R = rho / 0.8;  // nz >= 0.6 at the rim
    NormalMap map(size, size, normcraft::kAxisZ, false);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double x = c - cx, y = r - cy;
            if (x * x + y * y > rho * rho) continue;
            const double z = std::sqrt(R * R - x * x - y * y);
            map.set(r, c, Vec3{x / R, y / R, z / R});
        }
    return map;
}

// Hemisphere cap with a bump carpet riding on it.
inline NormalMap bumpy_hemisphere(int w, int h, double radius_scale = 1.3,
                                  double amplitude = 1.5, double wavelength = 16.0) {
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    const double R = radius_scale * std::sqrt(cx * cx + cy * cy) + 1.0;
    return from_gradients(w, h, [=](double px, double py, double& zx, double& zy) {
        const double x = px - cx, y = py - cy;
        const double z = std::sqrt(R * R - x * x - y * y);
        const double k = kTau / wavelength;
        zx = -x / z + amplitude * k * std::cos(k * px) * std::sin(k * py);
        zy = -y / z + amplitude * k * std::sin(k * px) * std::cos(k * py);
    });
}

// One-pixel checkerboard of +/- theta tilts about the y axis.
inline NormalMap checkerboard(int w, int h, double theta_rad = 0.3) {
    NormalMap map(w, h);
    const double s = std::sin(theta_rad), c = std::cos(theta_rad);
    for (int r = 0; r < h; ++r)
        for (int cc = 0; cc < w; ++cc)
            map.at(r, cc) = (r + cc) % 2 == 0 ? Vec3{s, 0.0, c} : Vec3{-s, 0.0, c};
    return map;
}

// Bump carpet with a sharp tilt step down the middle column.
inline NormalMap step_discontinuity(int w, int h, double tilt_rad = 0.5,
                                    double amplitude = 1.0, double wavelength = 16.0) {
    NormalMap map = bump_plane(w, h, amplitude, wavelength);
    const double s = std::sin(tilt_rad), c = std::cos(tilt_rad);
    for (int r = 0; r < h; ++r)
        for (int cc = 0; cc < w; ++cc) {
            Vec3& n = map.at(r, cc);
            const double sign = cc < w / 2 ? 1.0 : -1.0;
            // rotate about y by +/- tilt
            n = Vec3{c * n.x + sign * s * n.z, n.y, -sign * s * n.x + c * n.z};
        }
    return map;
}

// Smooth random surface: a few random-phase low-frequency waves.
inline NormalMap random_smooth(int w, int h, std::uint64_t seed, double amplitude = 4.0) {
    std::mt19937_64 rng(seed);
    std::vector<double> kx(4), ky(4), ph(4), am(4);
    for (int i = 0; i < 4; ++i) {
        kx[i] = kTau * (1.0 + double(rng() % 3)) / w;
        ky[i] = kTau * (1.0 + double(rng() % 3)) / h;
        ph[i] = kTau * double(rng() % 1000) / 1000.0;
        am[i] = amplitude * (0.5 + double(rng() % 1000) / 2000.0);
    }
    return from_gradients(w, h, [=](double x, double y, double& zx, double& zy) {
        zx = zy = 0.0;
        for (int i = 0; i < 4; ++i) {
            zx += am[i] * kx[i] * std::cos(kx[i] * x + ky[i] * y + ph[i]);
            zy += am[i] * ky[i] * std::cos(kx[i] * x + ky[i] * y + ph[i]);
        }
    });
}

// Independent uniform directions (not smooth); nz_min bounds the z component.
inline NormalMap random_units(int w, int h, std::uint64_t seed, double nz_min = -1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    NormalMap map(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            Vec3 v;
            do {
                v = Vec3{uni(rng), uni(rng), uni(rng)};
            } while (v.squared_norm() > 1.0 || v.squared_norm() < 1e-4 ||
                     v.normalized().z < nz_min);
            map.at(r, c) = v.normalized();
        }
    return map;
}

inline Vec3 random_unit(std::mt19937_64& rng, double nz_min = -1.0) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec3 v;
    do {
        v = Vec3{uni(rng), uni(rng), uni(rng)};
    } while (v.squared_norm() > 1.0 || v.squared_norm() < 1e-4 ||
             v.normalized().z < nz_min);
    return v.normalized();
}

}  // namespace fixtures
