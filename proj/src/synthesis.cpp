#include "normcraft/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace normcraft {

namespace {

void validate(const Swatch& swatch, const SynthesisParams& p) {
    if (p.window < 3 || p.window % 2 == 0)
        throw InvalidParams("synthesis: window must be odd and >= 3");
    if (!(p.err_tolerance > 0.0 && p.err_tolerance <= 1.0))
        throw InvalidParams("synthesis: err_tolerance must be in (0, 1]");
    if (p.out_width < 1 || p.out_height < 1)
        throw InvalidParams("synthesis: output dimensions must be positive");
    if (swatch.detail.width() < p.window || swatch.detail.height() < p.window)
        throw SwatchTooSmall("synthesis: swatch smaller than the matching window");
    if (p.out_width < swatch.detail.width() || p.out_height < swatch.detail.height())
        throw InvalidParams("synthesis: output smaller than the swatch");
    for (auto m : swatch.detail.mask())
        if (!m) throw InvalidParams("synthesis: swatch must be fully valid");
}

struct Frontier {
    int r, c;
    int known;
};

}  // namespace

NormalMap synthesize_detail(const Swatch& swatch, const SynthesisParams& p) {
    validate(swatch, p);
    const NormalMap& src = swatch.detail;
    const int sw = src.width(), sh = src.height();
    const int ow = p.out_width, oh = p.out_height;
    const int hw = p.window / 2;

    // Degenerate request: the swatch already is the full-size answer.
    if (ow == sw && oh == sh) return src;

    // Gaussian weighting of the matching window (sigma = window/6.4, the
    // usual choice for this growth scheme).
    const double sigma = p.window / 6.4;
    std::vector<double> wwin(static_cast<std::size_t>(p.window) * p.window);
    for (int s = -hw; s <= hw; ++s)
        for (int t = -hw; t <= hw; ++t)
            wwin[static_cast<std::size_t>(s + hw) * p.window + (t + hw)] =
                std::exp(-(s * s + t * t) / (2.0 * sigma * sigma));

    std::mt19937_64 rng(p.seed);

    NormalMap out(ow, oh, kAxisZ, true);
    std::vector<std::uint8_t> known(out.size(), 0);

    // Seed: a random window-sized patch of the swatch, placed at the origin.
    {
        const int sr = static_cast<int>(rng() % std::uint64_t(sh - p.window + 1));
        const int sc = static_cast<int>(rng() % std::uint64_t(sw - p.window + 1));
        for (int r = 0; r < p.window; ++r)
            for (int c = 0; c < p.window; ++c) {
                out.at(r, c) = src.at(sr + r, sc + c);
                known[out.index(r, c)] = 1;
            }
    }

    // Candidate centers where the full window fits inside the swatch.
    std::vector<std::pair<int, int>> centers;
    for (int r = hw; r < sh - hw; ++r)
        for (int c = hw; c < sw - hw; ++c) centers.emplace_back(r, c);
    std::vector<double> dist(centers.size());

    long remaining = static_cast<long>(out.size()) - p.window * p.window;
    std::vector<Frontier> frontier;
    std::vector<std::size_t> eligible;

    while (remaining > 0) {
        // Unfilled pixels that touch the known region, most-constrained first.
        frontier.clear();
        for (int r = 0; r < oh; ++r)
            for (int c = 0; c < ow; ++c) {
                if (known[out.index(r, c)]) continue;
                int cnt = 0;
                for (int s = std::max(-hw, -r); s <= std::min(hw, oh - 1 - r); ++s)
                    for (int t = std::max(-hw, -c); t <= std::min(hw, ow - 1 - c); ++t)
                        cnt += known[out.index(r + s, c + t)];
                if (cnt > 0) frontier.push_back({r, c, cnt});
            }
        if (frontier.empty())
            throw NonConvergence("synthesis: no growable pixel left");
        std::stable_sort(frontier.begin(), frontier.end(),
                         [](const Frontier& a, const Frontier& b) {
                             if (a.known != b.known) return a.known > b.known;
                             if (a.r != b.r) return a.r < b.r;
                             return a.c < b.c;
                         });

        for (const Frontier& f : frontier) {
            const int r = f.r, c = f.c;
            const long long ncand = static_cast<long long>(centers.size());
#pragma omp parallel for
            for (long long ci = 0; ci < ncand; ++ci) {
                const auto [cr, cc] = centers[ci];
                double ssd = 0.0, wsum = 0.0;
                for (int s = -hw; s <= hw; ++s) {
                    const int rr = r + s;
                    if (rr < 0 || rr >= oh) continue;
                    for (int t = -hw; t <= hw; ++t) {
                        const int ccol = c + t;
                        if (ccol < 0 || ccol >= ow) continue;
                        if (!known[out.index(rr, ccol)]) continue;
                        const double g =
                            wwin[static_cast<std::size_t>(s + hw) * p.window + (t + hw)];
                        const Vec3 d = out.at(rr, ccol) - src.at(cr + s, cc + t);
                        ssd += g * d.squared_norm();
                        wsum += g;
                    }
                }
                dist[ci] = wsum > 0.0 ? ssd / wsum : 0.0;
            }
            double best = dist[0];
            for (std::size_t i = 1; i < dist.size(); ++i) best = std::min(best, dist[i]);
            const double cutoff = best * (1.0 + p.err_tolerance);
            eligible.clear();
            for (std::size_t i = 0; i < dist.size(); ++i)
                if (dist[i] <= cutoff) eligible.push_back(i);
            if (eligible.empty()) throw NonConvergence("synthesis: no candidate in range");
            const std::size_t pick = eligible[rng() % eligible.size()];
            out.at(r, c) = src.at(centers[pick].first, centers[pick].second);
            known[out.index(r, c)] = 1;
            --remaining;
        }
    }
    return out;
}

TransferResult synthesize_onto(const Swatch& swatch, const NormalMap& target_shape,
                               const SynthesisParams& p, const Kernel& k) {
    SynthesisParams grown = p;
    grown.out_width = target_shape.width();
    grown.out_height = target_shape.height();
    TransferRequest req;
    req.source_detail = synthesize_detail(swatch, grown);
    req.target_shape = target_shape;
    return transfer(req, k);
}

}  // namespace normcraft
