#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "normcraft/normal_map.hpp"

namespace normcraft {

// Surface slopes p = dz/dx (x = column), q = dz/dy (y = row, increasing
// downward), derived from normals as p = -nx / max(nz, eps), q = -ny / ...
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> p, q;
    int clamped_count = 0;  // grazing normals where nz hit the clamp

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * width + c;
    }
};

struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> z;  // mean-centered over the valid pixels
    std::vector<std::uint8_t> mask;

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * width + c;
    }
};

struct PoissonResult {
    DepthMap depth;
    double residual = 0.0;
    int iterations = 0;
    bool converged = true;
};

GradientField normals_to_gradients(const NormalMap& n);

// Least-squares integration over the full periodic frame (spectral). The mean
// gradient is integrated separately so affine trends survive the periodic
// model. Input must cover the whole rectangle.
DepthMap integrate_frankot(const GradientField& g);

// Masked-domain least squares: conjugate gradient on the mask-restricted
// Poisson system with natural boundary conditions. Stops at relative residual
// 1e-6 or 10^4 iterations; the best iterate is returned either way, with the
// convergence status on the side.
PoissonResult integrate_poisson(const GradientField& g,
                                const std::vector<std::uint8_t>& mask);

struct Mesh {
    std::vector<double> vertices;      // x,y,z triples, row-major pixel order
    std::vector<unsigned int> faces;   // 1-indexed vertex triples
};

// Grid triangulation over valid pixels: two triangles per quad whose four
// corners are all valid. scale is the pixel pitch in length units.
Mesh depth_to_mesh(const DepthMap& d, double scale);

void write_obj(const Mesh& mesh, std::ostream& os);

}  // namespace normcraft
