#include "normcraft/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <vector>

#include "normcraft/fft.hpp"

namespace normcraft {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGradClampZ = 1e-4;

void mean_center(DepthMap& d) {
    double sum = 0.0;
    long cnt = 0;
    for (std::size_t i = 0; i < d.z.size(); ++i)
        if (d.mask[i]) {
            sum += d.z[i];
            ++cnt;
        }
    if (cnt == 0) return;
    const double mean = sum / cnt;
    for (std::size_t i = 0; i < d.z.size(); ++i)
        if (d.mask[i]) d.z[i] -= mean;
}

}  // namespace

GradientField normals_to_gradients(const NormalMap& n) {
    GradientField g;
    g.width = n.width();
    g.height = n.height();
    g.p.assign(n.size(), 0.0);
    g.q.assign(n.size(), 0.0);
    for (int r = 0; r < n.height(); ++r) {
        for (int c = 0; c < n.width(); ++c) {
            if (!n.valid(r, c)) continue;
            const Vec3& v = n.at(r, c);
            double nz = v.z;
            if (nz < kGradClampZ) {
                nz = kGradClampZ;
                ++g.clamped_count;
            }
            g.p[g.index(r, c)] = -v.x / nz;
            g.q[g.index(r, c)] = -v.y / nz;
        }
    }
    return g;
}

DepthMap integrate_frankot(const GradientField& g) {
    const int h = g.height, w = g.width;
    if (h < 1 || w < 1) throw InvalidParams("integrate_frankot: empty field");

    // The periodic model cannot carry an affine trend; integrate the mean
    // gradient separately and put it back at the end.
    double p0 = 0.0, q0 = 0.0;
    for (std::size_t i = 0; i < g.p.size(); ++i) {
        p0 += g.p[i];
        q0 += g.q[i];
    }
    p0 /= double(g.p.size());
    q0 /= double(g.q.size());

    std::vector<std::complex<double>> P(g.p.size()), Q(g.q.size());
    for (std::size_t i = 0; i < g.p.size(); ++i) {
        P[i] = g.p[i] - p0;
        Q[i] = g.q[i] - q0;
    }
    fft2(P, h, w, false);
    fft2(Q, h, w, false);

    std::vector<std::complex<double>> Z(g.p.size());
    for (int r = 0; r < h; ++r) {
        const int fr = r <= h / 2 ? r : r - h;
        const double v = 2.0 * kPi * double(fr) / double(h);
        for (int c = 0; c < w; ++c) {
            const int fc = c <= w / 2 ? c : c - w;
            const double u = 2.0 * kPi * double(fc) / double(w);
            const double denom = u * u + v * v;
            const std::size_t i = g.index(r, c);
            if (denom == 0.0) {
                Z[i] = 0.0;
                continue;
            }
            // Least squares of i*u*Z ~ P, i*v*Z ~ Q.
            Z[i] = (std::complex<double>(0.0, -u) * P[i] +
                    std::complex<double>(0.0, -v) * Q[i]) /
                   denom;
        }
    }
    fft2(Z, h, w, true);

    DepthMap d;
    d.width = w;
    d.height = h;
    d.z.resize(g.p.size());
    d.mask.assign(g.p.size(), 1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            d.z[d.index(r, c)] = Z[d.index(r, c)].real() + p0 * c + q0 * r;
    mean_center(d);
    return d;
}

namespace {

// Deterministic dot product: fixed-size block partials combined in order.
double dot_blocked(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    const std::size_t block = 4096;
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for
    for (long long bi = 0; bi < static_cast<long long>(nblocks); ++bi) {
        double acc = 0.0;
        const std::size_t lo = bi * block, hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i];
        partial[bi] = acc;
    }
    double sum = 0.0;
    for (double v : partial) sum += v;
    return sum;
}

}  // namespace

PoissonResult integrate_poisson(const GradientField& g,
                                const std::vector<std::uint8_t>& mask) {
    const int h = g.height, w = g.width;
    if (mask.size() != g.p.size())
        throw DimensionMismatch("integrate_poisson: mask layout does not match the field");

    std::vector<int> id(mask.size(), -1);
    int n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) id[i] = n++;
    if (n == 0) throw InvalidParams("integrate_poisson: empty mask");

    // Least-squares normal equations over 4-neighbor edges inside the mask:
    // graph Laplacian on the left, edge-averaged gradient divergence on the
    // right. Natural (Neumann) boundary falls out of simply dropping edges
    // that leave the mask.
    std::vector<int> nbr(static_cast<std::size_t>(n) * 4, -1);
    std::vector<double> b(n, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = g.index(r, c);
            if (!mask[i]) continue;
            const int me = id[i];
            if (c + 1 < w && mask[i + 1]) {
                const double t = 0.5 * (g.p[i] + g.p[i + 1]);
                nbr[static_cast<std::size_t>(me) * 4 + 0] = id[i + 1];
                nbr[static_cast<std::size_t>(id[i + 1]) * 4 + 1] = me;
                b[me] -= t;
                b[id[i + 1]] += t;
            }
            if (r + 1 < h && mask[i + w]) {
                const double t = 0.5 * (g.q[i] + g.q[i + w]);
                nbr[static_cast<std::size_t>(me) * 4 + 2] = id[i + w];
                nbr[static_cast<std::size_t>(id[i + w]) * 4 + 3] = me;
                b[me] -= t;
                b[id[i + w]] += t;
            }
        }
    }

    auto apply_laplacian = [&](const std::vector<double>& x, std::vector<double>& y) {
#pragma omp parallel for
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            int deg = 0;
            for (int e = 0; e < 4; ++e) {
                const int j = nbr[static_cast<std::size_t>(i) * 4 + e];
                if (j < 0) continue;
                acc += x[j];
                ++deg;
            }
            y[i] = deg * x[i] - acc;
        }
    };

    const double bnorm = std::sqrt(dot_blocked(b, b));
    std::vector<double> x(n, 0.0);
    PoissonResult result;
    result.depth.width = w;
    result.depth.height = h;
    result.depth.z.assign(mask.size(), 0.0);
    result.depth.mask = mask;

    if (bnorm > 0.0) {
        std::vector<double> r_vec = b, p_vec = b, ap(n);
        double rs_old = dot_blocked(r_vec, r_vec);
        const int max_iter = 10000;
        int it = 0;
        double rel = std::sqrt(rs_old) / bnorm;
        for (; it < max_iter && rel > 1e-6; ++it) {
            apply_laplacian(p_vec, ap);
            const double alpha = rs_old / dot_blocked(p_vec, ap);
#pragma omp parallel for
            for (int i = 0; i < n; ++i) {
                x[i] += alpha * p_vec[i];
                r_vec[i] -= alpha * ap[i];
            }
            const double rs_new = dot_blocked(r_vec, r_vec);
            rel = std::sqrt(rs_new) / bnorm;
            const double beta = rs_new / rs_old;
#pragma omp parallel for
            for (int i = 0; i < n; ++i) p_vec[i] = r_vec[i] + beta * p_vec[i];
            rs_old = rs_new;
        }
        result.iterations = it;
        result.residual = rel;
        result.converged = rel <= 1e-6;
    }

    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) result.depth.z[i] = x[id[i]];
    mean_center(result.depth);
    return result;
}

Mesh depth_to_mesh(const DepthMap& d, double scale) {
    Mesh mesh;
    std::vector<int> vid(d.z.size(), -1);
    int n = 0;
    for (int r = 0; r < d.height; ++r)
        for (int c = 0; c < d.width; ++c) {
            const std::size_t i = d.index(r, c);
            if (!d.mask[i]) continue;
            vid[i] = n++;
            mesh.vertices.push_back(c * scale);
            mesh.vertices.push_back(r * scale);
            mesh.vertices.push_back(d.z[i]);
        }
    for (int r = 0; r + 1 < d.height; ++r)
        for (int c = 0; c + 1 < d.width; ++c) {
            const int a = vid[d.index(r, c)], bq = vid[d.index(r, c + 1)];
            const int cc = vid[d.index(r + 1, c)], dd = vid[d.index(r + 1, c + 1)];
            if (a < 0 || bq < 0 || cc < 0 || dd < 0) continue;
            mesh.faces.push_back(a + 1);
            mesh.faces.push_back(dd + 1);
            mesh.faces.push_back(bq + 1);
            mesh.faces.push_back(a + 1);
            mesh.faces.push_back(cc + 1);
            mesh.faces.push_back(dd + 1);
        }
    return mesh;
}

void write_obj(const Mesh& mesh, std::ostream& os) {
    os.precision(9);
    for (std::size_t i = 0; i < mesh.vertices.size(); i += 3)
        os << "v " << mesh.vertices[i] << ' ' << mesh.vertices[i + 1] << ' '
           << mesh.vertices[i + 2] << '\n';
    for (std::size_t i = 0; i < mesh.faces.size(); i += 3)
        os << "f " << mesh.faces[i] << ' ' << mesh.faces[i + 1] << ' '
           << mesh.faces[i + 2] << '\n';
}

}  // namespace normcraft
