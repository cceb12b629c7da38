#include "normcraft/transfer.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <vector>

#include "normcraft/rotation.hpp"

namespace normcraft {

namespace {

struct SourceIndexer {
    const NormalMap& src;
    Tiling tiling;
    // Sources anchor at the region's bounding-box origin when an explicit
    // region was given, at the target origin otherwise (aligned grids).
    int anchor_r = 0;
    int anchor_c = 0;

    // Wrap tiles the source toroidally; otherwise indices clamp, which only
    // matters for seam-band pixels just outside the region.
    const Vec3& value(int r, int c) const { return src.at(row(r), col(c)); }
    bool valid(int r, int c) const { return src.valid(row(r), col(c)); }
    int row(int r) const { return fold(r - anchor_r, src.height()); }
    int col(int c) const { return fold(c - anchor_c, src.width()); }
    int fold(int v, int n) const {
        if (tiling == Tiling::kWrap) return ((v % n) + n) % n;
        return std::clamp(v, 0, n - 1);
    }
};

std::vector<std::uint8_t> effective_region(const TransferRequest& req) {
    const auto& tgt = req.target_shape;
    if (!req.region) return tgt.mask();
    if (req.region->size() != tgt.size())
        throw RegionOutOfBounds("transfer: region layout does not match the target");
    for (std::size_t i = 0; i < tgt.size(); ++i)
        if ((*req.region)[i] && !tgt.mask()[i])
            throw RegionOutOfBounds("transfer: region extends outside the target mask");
    return *req.region;
}

// Bounding box of the region; also validates that the source covers it when
// tiling is off. Returns the anchor for explicit regions.
std::pair<int, int> source_anchor(const TransferRequest& req,
                                  const std::vector<std::uint8_t>& region) {
    const auto& tgt = req.target_shape;
    int min_r = tgt.height(), min_c = tgt.width(), max_r = -1, max_c = -1;
    for (int r = 0; r < tgt.height(); ++r)
        for (int c = 0; c < tgt.width(); ++c)
            if (region[tgt.index(r, c)]) {
                min_r = std::min(min_r, r);
                min_c = std::min(min_c, c);
                max_r = std::max(max_r, r);
                max_c = std::max(max_c, c);
            }
    if (max_r < 0) return {0, 0};  // empty region
    const int anchor_r = req.region ? min_r : 0;
    const int anchor_c = req.region ? min_c : 0;
    if (req.tiling == Tiling::kNone &&
        (max_r - anchor_r >= req.source_detail.height() ||
         max_c - anchor_c >= req.source_detail.width()))
        throw DimensionMismatch("transfer: source detail (" +
                                std::to_string(req.source_detail.width()) + "x" +
                                std::to_string(req.source_detail.height()) +
                                ") does not cover the region without tiling");
    return {anchor_r, anchor_c};
}

NormalMap with_mask(const NormalMap& n, const std::vector<std::uint8_t>& keep) {
    NormalMap out = n;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!keep[i]) out.mask()[i] = 0;
    return out;
}

// Metrics of a transferred map against the target shape and the source detail
// it was built from, over the region only.
void fill_metrics(TransferResult& res, const NormalMap& target,
                  const NormalMap& source_aligned,
                  const std::vector<std::uint8_t>& region, const Kernel& k) {
    if (std::find(region.begin(), region.end(), std::uint8_t(1)) == region.end()) {
        res.detail_ssim = 1.0;  // nothing transferred, nothing to compare
        return;
    }
    Decomposition redecomp = decompose(res.output, k);
    res.shape_mae_deg = mae(with_mask(redecomp.shape, region), with_mask(target, region));
    const MetricReport rep =
        ssim(with_mask(redecomp.detail, region), with_mask(source_aligned, region));
    res.detail_mae_deg = rep.mae_deg;
    res.detail_ssim = rep.ssim;
}

}  // namespace

TransferResult transfer(const TransferRequest& req, const Kernel& k) {
    const auto& tgt = req.target_shape;
    const auto region = effective_region(req);
    const auto [anchor_r, anchor_c] = source_anchor(req, region);
    const SourceIndexer src{req.source_detail, req.tiling, anchor_r, anchor_c};

    const int h = tgt.height(), w = tgt.width();
    NormalMap out = tgt;
    // Aligned copy of the source values actually used, for the detail checks.
    NormalMap aligned(w, h, kAxisZ, false);
    std::vector<std::uint8_t> transferred(tgt.size(), 0);

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = tgt.index(r, c);
            if (!region[i] || !tgt.valid(r, c)) continue;
            if (!src.valid(r, c)) continue;  // no detail to place; target stays
            const Vec3 delta = src.value(r, c);
            out.at(r, c) = rotation_from_z_safe(tgt.at(r, c)).apply(delta);
            aligned.set(r, c, delta);
            transferred[i] = 1;
        }
    }

    TransferResult res;
    res.output = std::move(out);
    fill_metrics(res, tgt, aligned, transferred, k);
    return res;
}

TransferResult local_transfer(const TransferRequest& req, const Kernel& k) {
    if (!req.region) throw InvalidParams("local_transfer: region is required");
    const auto& tgt = req.target_shape;
    const auto region = effective_region(req);
    const auto [anchor_r, anchor_c] = source_anchor(req, region);
    const SourceIndexer src{req.source_detail, req.tiling, anchor_r, anchor_c};

    const int h = tgt.height(), w = tgt.width();
    const int band = 2 * k.half_width();

    // Chessboard distance from every valid out-of-region pixel to the region,
    // capped at the feather width.
    std::vector<int> dist(tgt.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < tgt.size(); ++i)
        if (region[i]) {
            dist[i] = 0;
            queue.push_back(i);
        }
    const bool have_region = !queue.empty();
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        if (dist[i] >= band) continue;
        const int r = static_cast<int>(i) / w, c = static_cast<int>(i) % w;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                const std::size_t j = tgt.index(rr, cc);
                if (dist[j] >= 0 || !tgt.mask()[j]) continue;
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
    }

    NormalMap out = tgt;
    NormalMap aligned(w, h, kAxisZ, false);
    std::vector<std::uint8_t> transferred(tgt.size(), 0);
    int degenerate_r = -1, degenerate_c = -1;

    if (have_region) {
#pragma omp parallel for
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const std::size_t i = tgt.index(r, c);
                if (!tgt.valid(r, c) || dist[i] < 0) continue;
                if (!src.valid(r, c)) continue;
                const Vec3 placed =
                    rotation_from_z_safe(tgt.at(r, c)).apply(src.value(r, c));
                if (region[i]) {
                    out.at(r, c) = placed;
                    aligned.set(r, c, src.value(r, c));
                    transferred[i] = 1;
                } else {
                    // Seam band: fade the transferred normals into the target.
                    const double beta = double(band + 1 - dist[i]) / (band + 1);
                    const Vec3 mix = tgt.at(r, c) * (1.0 - beta) + placed * beta;
                    const double len = mix.norm();
                    if (len < 1e-12) {
#pragma omp critical
                        if (degenerate_r < 0) {
                            degenerate_r = r;
                            degenerate_c = c;
                        }
                        continue;
                    }
                    out.at(r, c) = mix * (1.0 / len);
                }
            }
        }
    }
    if (degenerate_r >= 0)
        throw DegeneratePixel("local_transfer: seam blend cancelled at (" +
                              std::to_string(degenerate_r) + "," +
                              std::to_string(degenerate_c) + ")");

    TransferResult res;
    res.output = std::move(out);
    if (have_region) {
        fill_metrics(res, tgt, aligned, transferred, k);
    } else {
        res.detail_ssim = 1.0;
    }
    return res;
}

std::vector<MetricReport> transfer_roundtrip_chain(const NormalMap& detail,
                                                   const std::vector<NormalMap>& shapes,
                                                   const Kernel& k) {
    std::vector<MetricReport> reports;
    reports.reserve(shapes.size());
    NormalMap current = detail;
    for (const auto& shape : shapes) {
        TransferRequest req;
        req.source_detail = current;
        req.target_shape = shape;
        TransferResult hop = transfer(req, k);
        current = decompose(hop.output, k).detail;
        reports.push_back(ssim(current, detail));
    }
    return reports;
}

}  // namespace normcraft
