#include "normcraft/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "normcraft/rotation.hpp"

namespace normcraft {

namespace {

constexpr double kSsimC1 = 0.01;
constexpr double kSsimC2 = 0.03;
constexpr int kSsimHalfWindow = 5;      // 11x11 window
constexpr double kSsimSigma = 1.5;

void check_same_dims(const NormalMap& a, const NormalMap& b) {
    if (!a.same_dims(b)) throw DimensionMismatch("metrics: map dimensions differ");
}

std::vector<std::uint8_t> joint_mask(const NormalMap& a, const NormalMap& b) {
    std::vector<std::uint8_t> m(a.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = a.mask()[i] && b.mask()[i];
    return m;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Separable windowed sum with the SSIM Gaussian taps; no normalization here,
// the caller divides by the equally filtered mask weights.
void window_filter(const std::vector<double>& in, int h, int w,
                   const std::vector<double>& taps, std::vector<double>& tmp,
                   std::vector<double>& out) {
    const int hw = static_cast<int>(taps.size()) / 2;
#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            const int t0 = std::max(-hw, -c), t1 = std::min(hw, w - 1 - c);
            for (int t = t0; t <= t1; ++t)
                acc += taps[t + hw] * in[static_cast<std::size_t>(r) * w + c + t];
            tmp[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        const int s0 = std::max(-hw, -r), s1 = std::min(hw, h - 1 - r);
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int s = s0; s <= s1; ++s)
                acc += taps[s + hw] * tmp[static_cast<std::size_t>(r + s) * w + c];
            out[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
}

std::vector<double> ssim_window_taps() {
    std::vector<double> taps(2 * kSsimHalfWindow + 1);
    double sum = 0.0;
    for (int i = 0; i < static_cast<int>(taps.size()); ++i) {
        const double d = i - kSsimHalfWindow;
        taps[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += taps[i];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

double channel_value(const Vec3& v, int k) { return k == 0 ? v.x : (k == 1 ? v.y : v.z); }

}  // namespace

double mae(const NormalMap& a, const NormalMap& b) {
    check_same_dims(a, b);
    const int h = a.height(), w = a.width();
    std::vector<double> row_sum(h, 0.0);
    std::vector<long> row_cnt(h, 0);

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        double acc = 0.0;
        long cnt = 0;
        for (int c = 0; c < w; ++c) {
            if (!a.valid(r, c) || !b.valid(r, c)) continue;
            ++cnt;
            // bitwise-equal pixels are at angle zero; skipping them keeps
            // mae(a, a) == 0 despite arccos conditioning near 1
            if (a.at(r, c) == b.at(r, c)) continue;
            const double d = std::clamp(a.at(r, c).dot(b.at(r, c)), -1.0, 1.0);
            acc += std::acos(d);
        }
        row_sum[r] = acc;
        row_cnt[r] = cnt;
    }

    double total = 0.0;
    long count = 0;
    for (int r = 0; r < h; ++r) {
        total += row_sum[r];
        count += row_cnt[r];
    }
    if (count == 0) throw EmptyOverlap("mae: masks do not overlap");
    return rad_to_deg(total / count);
}

MetricReport ssim(const NormalMap& a, const NormalMap& b) {
    check_same_dims(a, b);
    const int h = a.height(), w = a.width();
    const std::size_t n = a.size();
    const auto omega = joint_mask(a, b);
    const auto taps = ssim_window_taps();

    std::vector<double> mask_d(n), tmp(n), wgt(n);
    for (std::size_t i = 0; i < n; ++i) mask_d[i] = omega[i] ? 1.0 : 0.0;
    window_filter(mask_d, h, w, taps, tmp, wgt);

    MetricReport rep;
    std::vector<double> fa(n), fb(n), sa(n), sb(n), saa(n), sbb(n), sab(n);
    for (int k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            fa[i] = omega[i] ? channel_value(a.data()[i], k) : 0.0;
            fb[i] = omega[i] ? channel_value(b.data()[i], k) : 0.0;
        }
        window_filter(fa, h, w, taps, tmp, sa);
        window_filter(fb, h, w, taps, tmp, sb);
        for (std::size_t i = 0; i < n; ++i) mask_d[i] = fa[i] * fa[i];
        window_filter(mask_d, h, w, taps, tmp, saa);
        for (std::size_t i = 0; i < n; ++i) mask_d[i] = fb[i] * fb[i];
        window_filter(mask_d, h, w, taps, tmp, sbb);
        for (std::size_t i = 0; i < n; ++i) mask_d[i] = fa[i] * fb[i];
        window_filter(mask_d, h, w, taps, tmp, sab);

        std::vector<double> row_sum(h, 0.0);
        std::vector<long> row_cnt(h, 0);
#pragma omp parallel for
        for (int r = 0; r < h; ++r) {
            double acc = 0.0;
            long cnt = 0;
            for (int c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w + c;
                if (!omega[i]) continue;
                const double inv = 1.0 / wgt[i];
                const double mu_a = sa[i] * inv, mu_b = sb[i] * inv;
                const double va = saa[i] * inv - mu_a * mu_a;
                const double vb = sbb[i] * inv - mu_b * mu_b;
                const double cov = sab[i] * inv - mu_a * mu_b;
                acc += (2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2) /
                       ((mu_a * mu_a + mu_b * mu_b + kSsimC1) * (va + vb + kSsimC2));
                ++cnt;
            }
            row_sum[r] = acc;
            row_cnt[r] = cnt;
        }
        double total = 0.0;
        long count = 0;
        for (int r = 0; r < h; ++r) {
            total += row_sum[r];
            count += row_cnt[r];
        }
        if (count == 0) throw EmptyOverlap("ssim: masks do not overlap");
        rep.per_channel_ssim[k] = clamp01(total / count);
        rep.n_pixels = count;
    }
    rep.ssim = clamp01((rep.per_channel_ssim[0] + rep.per_channel_ssim[1] +
                        rep.per_channel_ssim[2]) / 3.0);
    rep.mae_deg = mae(a, b);
    return rep;
}

RotSimilarityField rotation_similarity(const NormalMap& shape, int w) {
    if (w < 1) throw InvalidParams("rotation_similarity: window half-width must be >= 1");
    const RotationField field = build_rotation_field(shape);
    const int h = shape.height(), wd = shape.width();

    RotSimilarityField out;
    out.width = wd;
    out.height = h;
    out.theta_deg.assign(shape.size(), 0.0);
    out.l1.assign(shape.size(), 0.0);
    out.l2.assign(shape.size(), 0.0);
    out.linf.assign(shape.size(), 0.0);
    out.mask = shape.mask();

    std::vector<double> row_theta(h, 0.0), row_l1(h, 0.0), row_l2(h, 0.0), row_linf(h, 0.0);
    std::vector<long> row_cnt(h, 0);

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < wd; ++c) {
            if (!shape.valid(r, c)) continue;
            const Rotation3& rc = field.at(r, c);
            double sum_theta = 0.0, sum_l1 = 0.0, sum_l2 = 0.0, sum_linf = 0.0;
            long members = 0;
            const int s0 = std::max(-w, -r), s1 = std::min(w, h - 1 - r);
            const int t0 = std::max(-w, -c), t1 = std::min(w, wd - 1 - c);
            for (int s = s0; s <= s1; ++s) {
                for (int t = t0; t <= t1; ++t) {
                    if (!shape.valid(r + s, c + t)) continue;
                    const Rotation3& other = field.at(r + s, c + t);
                    if (std::memcmp(rc.m, other.m, sizeof rc.m) == 0) {
                        ++members;  // identical rotations contribute exact zeros
                        continue;
                    }
                    const Rotation3 p = rc * other.transposed();
                    const double ct = std::clamp((p.trace() - 1.0) / 2.0, -1.0, 1.0);
                    const double theta = std::acos(ct);
                    double col[3] = {0, 0, 0}, row[3] = {0, 0, 0};
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) {
                            const double d = std::abs(p.m[3 * i + j] - (i == j ? 1.0 : 0.0));
                            row[i] += d;
                            col[j] += d;
                        }
                    sum_theta += theta;
                    sum_l1 += std::max({col[0], col[1], col[2]});
                    sum_linf += std::max({row[0], row[1], row[2]});
                    // Spectral norm of Q - I for a rotation Q by angle theta.
                    sum_l2 += 2.0 * std::sin(theta / 2.0);
                    ++members;
                }
            }
            const std::size_t i = shape.index(r, c);
            out.theta_deg[i] = rad_to_deg(sum_theta / members);
            out.l1[i] = sum_l1 / members;
            out.l2[i] = sum_l2 / members;
            out.linf[i] = sum_linf / members;
            row_theta[r] += out.theta_deg[i];
            row_l1[r] += out.l1[i];
            row_l2[r] += out.l2[i];
            row_linf[r] += out.linf[i];
            ++row_cnt[r];
        }
    }

    double st = 0, s1v = 0, s2v = 0, siv = 0;
    long count = 0;
    for (int r = 0; r < h; ++r) {
        st += row_theta[r];
        s1v += row_l1[r];
        s2v += row_l2[r];
        siv += row_linf[r];
        count += row_cnt[r];
    }
    if (count > 0) {
        out.mean.theta_bar_deg = st / count;
        out.mean.l1 = s1v / count;
        out.mean.l2 = s2v / count;
        out.mean.linf = siv / count;
    }
    return out;
}

std::vector<double> local_variance_field(const NormalMap& n, int w) {
    if (w < 1) throw InvalidParams("local_variance_field: window half-width must be >= 1");
    const int h = n.height(), wd = n.width();
    std::vector<double> out(n.size(), 0.0);

#pragma omp parallel for
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < wd; ++c) {
            if (!n.valid(r, c)) continue;
            Vec3 sum{};
            double sum_sq = 0.0;
            long cnt = 0;
            const int s0 = std::max(-w, -r), s1 = std::min(w, h - 1 - r);
            const int t0 = std::max(-w, -c), t1 = std::min(w, wd - 1 - c);
            for (int s = s0; s <= s1; ++s)
                for (int t = t0; t <= t1; ++t) {
                    if (!n.valid(r + s, c + t)) continue;
                    const Vec3& v = n.at(r + s, c + t);
                    sum += v;
                    sum_sq += v.squared_norm();
                    ++cnt;
                }
            const Vec3 mean = sum * (1.0 / cnt);
            out[n.index(r, c)] = std::max(0.0, sum_sq / cnt - mean.squared_norm());
        }
    }
    return out;
}

}  // namespace normcraft
