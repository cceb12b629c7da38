#include "normcraft/decompose.hpp"

#include <string>
#include <vector>

#include "normcraft/rotation.hpp"

namespace normcraft {

namespace {

void check_dims(const NormalMap& a, const NormalMap& b, const char* what) {
    if (!a.same_dims(b))
        throw DimensionMismatch(std::string(what) + ": maps are " +
                                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()));
}

}  // namespace

// Two separable passes over (value * mask) and (mask) carry the masked,
// weight-renormalized sum; dividing by the accumulated weight only rescales,
// so the final unit normalization absorbs it. Each output pixel is produced
// by one thread with a fixed tap order, so the result does not depend on the
// schedule.
NormalMap shape_component(const NormalMap& n, const Kernel& k) {
    if (n.empty()) throw InvalidParams("shape_component: empty map");
    const int h = n.height(), w = n.width(), hw = k.half_width();

    std::vector<Vec3> row_sum(n.size());
    std::vector<double> row_wgt(n.size(), 0.0);

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            Vec3 acc{};
            double wacc = 0.0;
            const int t0 = c - hw < 0 ? -c : -hw;
            const int t1 = c + hw >= w ? w - 1 - c : hw;
            for (int t = t0; t <= t1; ++t) {
                if (!n.valid(r, c + t)) continue;
                const double g = k.tap1d(t);
                acc += n.at(r, c + t) * g;
                wacc += g;
            }
            row_sum[n.index(r, c)] = acc;
            row_wgt[n.index(r, c)] = wacc;
        }
    }

    NormalMap out(w, h);
    out.mask() = n.mask();

    // Exceptions must not unwind through the parallel region; record the
    // first failing pixel and rethrow outside.
    int err_kind = 0, err_r = -1, err_c = -1;

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!n.valid(r, c)) {
                out.at(r, c) = Vec3{};
                continue;
            }
            Vec3 acc{};
            double wacc = 0.0;
            const int s0 = r - hw < 0 ? -r : -hw;
            const int s1 = r + hw >= h ? h - 1 - r : hw;
            for (int s = s0; s <= s1; ++s) {
                const double g = k.tap1d(s);
                acc += row_sum[n.index(r + s, c)] * g;
                wacc += row_wgt[n.index(r + s, c)] * g;
            }
            const double len = acc.norm();
            if (wacc <= 0.0 || len < 1e-12 * wacc) {
#pragma omp critical
                if (err_kind == 0) {
                    err_kind = wacc <= 0.0 ? 1 : 2;
                    err_r = r;
                    err_c = c;
                }
                continue;
            }
            out.at(r, c) = acc * (1.0 / len);
        }
    }
    if (err_kind == 1)
        throw EmptyNeighborhood("shape_component: no valid neighbors at (" +
                                std::to_string(err_r) + "," + std::to_string(err_c) + ")");
    if (err_kind == 2)
        throw DegeneratePixel("shape_component: filtered normals cancel at (" +
                              std::to_string(err_r) + "," + std::to_string(err_c) + ")");
    return out;
}

NormalMap detail_component(const NormalMap& n, const NormalMap& shape) {
    check_dims(n, shape, "detail_component");
    const int h = n.height(), w = n.width();
    NormalMap out(w, h);
    out.mask() = n.mask();

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!n.valid(r, c)) {
                out.at(r, c) = Vec3{};
                continue;
            }
            out.at(r, c) = rotation_to_z_safe(shape.at(r, c)).apply(n.at(r, c));
        }
    }
    return out;
}

Decomposition decompose(const NormalMap& n, const Kernel& k) {
    NormalMap shape = shape_component(n, k);
    NormalMap detail = detail_component(n, shape);
    return Decomposition{std::move(shape), std::move(detail), k};
}

NormalMap recompose(const NormalMap& shape, const NormalMap& detail) {
    check_dims(shape, detail, "recompose");
    const int h = shape.height(), w = shape.width();
    NormalMap out(w, h);
    out.mask() = detail.mask();

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!detail.valid(r, c) || !shape.valid(r, c)) {
                out.at(r, c) = Vec3{};
                out.mask()[out.index(r, c)] = 0;
                continue;
            }
            out.at(r, c) = rotation_from_z_safe(shape.at(r, c)).apply(detail.at(r, c));
        }
    }
    return out;
}

NormalMap recompose(const Decomposition& d) { return recompose(d.shape, d.detail); }

NormalMap detail_order_k(const NormalMap& n, const Kernel& k, int order) {
    if (order < 1) throw InvalidParams("detail_order_k: order must be >= 1");
    NormalMap current = decompose(n, k).detail;
    for (int j = 2; j <= order; ++j) current = decompose(current, k).detail;
    return current;
}

}  // namespace normcraft
