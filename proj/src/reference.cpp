#include "normcraft/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace normcraft::reference {

namespace {

constexpr double kC1 = 0.01;
constexpr double kC2 = 0.03;
constexpr int kWinHalf = 5;
constexpr double kWinSigma = 1.5;

double window_weight(int s, int t) {
    return std::exp(-(s * s + t * t) / (2.0 * kWinSigma * kWinSigma));
}

double channel(const Vec3& v, int k) { return k == 0 ? v.x : (k == 1 ? v.y : v.z); }

}  // namespace

NormalMap shape_component(const NormalMap& n, const Kernel& k) {
    const int h = n.height(), w = n.width(), hw = k.half_width();
    NormalMap out(w, h);
    out.mask() = n.mask();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!n.valid(r, c)) {
                out.at(r, c) = Vec3{};
                continue;
            }
            Vec3 acc{};
            double wsum = 0.0;
            for (int s = -hw; s <= hw; ++s) {
                for (int t = -hw; t <= hw; ++t) {
                    const int rr = r + s, cc = c + t;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w || !n.valid(rr, cc)) continue;
                    wsum += k.at(s, t);
                }
            }
            for (int s = -hw; s <= hw; ++s) {
                for (int t = -hw; t <= hw; ++t) {
                    const int rr = r + s, cc = c + t;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w || !n.valid(rr, cc)) continue;
                    acc += n.at(rr, cc) * (k.at(s, t) / wsum);
                }
            }
            const double len = acc.norm();
            if (len < 1e-12)
                throw DegeneratePixel("reference shape_component: cancellation at (" +
                                      std::to_string(r) + "," + std::to_string(c) + ")");
            out.at(r, c) = acc * (1.0 / len);
        }
    }
    return out;
}

Rotation3 align_rotation(const Vec3& a, const Vec3& b) {
    const Vec3 v = a.cross(b);
    const double c = a.dot(b);
    const double f = 1.0 / (1.0 + c);
    // K = [v]x, K^2 = v v^T - |v|^2 I
    const double k2 = v.squared_norm();
    Rotation3 r = Rotation3::identity();
    const double kx[9] = {0, -v.z, v.y, v.z, 0, -v.x, -v.y, v.x, 0};
    const double vv[9] = {v.x * v.x, v.x * v.y, v.x * v.z, v.y * v.x, v.y * v.y,
                          v.y * v.z, v.z * v.x, v.z * v.y, v.z * v.z};
    for (int i = 0; i < 9; ++i)
        r.m[i] += kx[i] + f * (vv[i] - (i % 4 == 0 ? k2 : 0.0));
    return r;
}

NormalMap detail_component(const NormalMap& n, const NormalMap& shape) {
    const int h = n.height(), w = n.width();
    NormalMap out(w, h);
    out.mask() = n.mask();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!n.valid(r, c)) {
                out.at(r, c) = Vec3{};
                continue;
            }
            out.at(r, c) = align_rotation(shape.at(r, c), kAxisZ).apply(n.at(r, c));
        }
    }
    return out;
}

double mae(const NormalMap& a, const NormalMap& b) {
    double sum = 0.0;
    long cnt = 0;
    for (int r = 0; r < a.height(); ++r)
        for (int c = 0; c < a.width(); ++c) {
            if (!a.valid(r, c) || !b.valid(r, c)) continue;
            ++cnt;
            if (a.at(r, c) == b.at(r, c)) continue;
            sum += std::acos(std::clamp(a.at(r, c).dot(b.at(r, c)), -1.0, 1.0));
        }
    if (cnt == 0) throw EmptyOverlap("reference mae: masks do not overlap");
    return rad_to_deg(sum / cnt);
}

MetricReport ssim(const NormalMap& a, const NormalMap& b) {
    const int h = a.height(), w = a.width();
    MetricReport rep;
    for (int k = 0; k < 3; ++k) {
        double total = 0.0;
        long count = 0;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                if (!a.valid(r, c) || !b.valid(r, c)) continue;
                // First pass: weighted means over the valid window.
                double wsum = 0.0, ma = 0.0, mb = 0.0;
                for (int s = -kWinHalf; s <= kWinHalf; ++s)
                    for (int t = -kWinHalf; t <= kWinHalf; ++t) {
                        const int rr = r + s, cc = c + t;
                        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                        if (!a.valid(rr, cc) || !b.valid(rr, cc)) continue;
                        const double g = window_weight(s, t);
                        wsum += g;
                        ma += g * channel(a.at(rr, cc), k);
                        mb += g * channel(b.at(rr, cc), k);
                    }
                ma /= wsum;
                mb /= wsum;
                // Second pass: weighted central moments.
                double va = 0.0, vb = 0.0, cov = 0.0;
                for (int s = -kWinHalf; s <= kWinHalf; ++s)
                    for (int t = -kWinHalf; t <= kWinHalf; ++t) {
                        const int rr = r + s, cc = c + t;
                        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                        if (!a.valid(rr, cc) || !b.valid(rr, cc)) continue;
                        const double g = window_weight(s, t) / wsum;
                        const double da = channel(a.at(rr, cc), k) - ma;
                        const double db = channel(b.at(rr, cc), k) - mb;
                        va += g * da * da;
                        vb += g * db * db;
                        cov += g * da * db;
                    }
                total += (2.0 * ma * mb + kC1) * (2.0 * cov + kC2) /
                         ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
                ++count;
            }
        }
        if (count == 0) throw EmptyOverlap("reference ssim: masks do not overlap");
        rep.per_channel_ssim[k] = std::min(1.0, std::max(0.0, total / count));
        rep.n_pixels = count;
    }
    rep.ssim = std::min(1.0, std::max(0.0, (rep.per_channel_ssim[0] + rep.per_channel_ssim[1] +
                                            rep.per_channel_ssim[2]) / 3.0));
    rep.mae_deg = reference::mae(a, b);
    return rep;
}

double spectral_norm(const double d[9]) {
    // Power iteration on D^T D; plenty for a 3x3.
    double m[9];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m[3 * i + j] = d[i] * d[j] + d[3 + i] * d[3 + j] + d[6 + i] * d[6 + j];
    double v[3] = {1.0, 0.7, 0.4};
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        double nv[3];
        for (int i = 0; i < 3; ++i)
            nv[i] = m[3 * i] * v[0] + m[3 * i + 1] * v[1] + m[3 * i + 2] * v[2];
        const double len = std::sqrt(nv[0] * nv[0] + nv[1] * nv[1] + nv[2] * nv[2]);
        if (len < 1e-300) return 0.0;
        for (int i = 0; i < 3; ++i) v[i] = nv[i] / len;
        lambda = len;
    }
    return std::sqrt(lambda);
}

RotSimilarityField rotation_similarity(const NormalMap& shape, int w) {
    const int h = shape.height(), wd = shape.width();
    RotSimilarityField out;
    out.width = wd;
    out.height = h;
    out.theta_deg.assign(shape.size(), 0.0);
    out.l1.assign(shape.size(), 0.0);
    out.l2.assign(shape.size(), 0.0);
    out.linf.assign(shape.size(), 0.0);
    out.mask = shape.mask();

    double st = 0, sl1 = 0, sl2 = 0, sli = 0;
    long count = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < wd; ++c) {
            if (!shape.valid(r, c)) continue;
            const Rotation3 rc = rotation_to_z_safe(shape.at(r, c));
            double sum_t = 0, sum_1 = 0, sum_2 = 0, sum_i = 0;
            long members = 0;
            for (int s = -w; s <= w; ++s) {
                for (int t = -w; t <= w; ++t) {
                    const int rr = r + s, cc = c + t;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= wd || !shape.valid(rr, cc))
                        continue;
                    const Rotation3 rn = rotation_to_z_safe(shape.at(rr, cc));
                    if (std::memcmp(rc.m, rn.m, sizeof rc.m) == 0) {
                        ++members;
                        continue;
                    }
                    const Rotation3 p = rc * rn.transposed();
                    double d[9];
                    for (int i = 0; i < 9; ++i) d[i] = p.m[i] - (i % 4 == 0 ? 1.0 : 0.0);
                    double col[3] = {0, 0, 0}, row[3] = {0, 0, 0};
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) {
                            row[i] += std::abs(d[3 * i + j]);
                            col[j] += std::abs(d[3 * i + j]);
                        }
                    sum_t += std::acos(std::clamp((p.trace() - 1.0) / 2.0, -1.0, 1.0));
                    sum_1 += std::max({col[0], col[1], col[2]});
                    sum_i += std::max({row[0], row[1], row[2]});
                    sum_2 += spectral_norm(d);
                    ++members;
                }
            }
            const std::size_t i = shape.index(r, c);
            out.theta_deg[i] = rad_to_deg(sum_t / members);
            out.l1[i] = sum_1 / members;
            out.l2[i] = sum_2 / members;
            out.linf[i] = sum_i / members;
            st += out.theta_deg[i];
            sl1 += out.l1[i];
            sl2 += out.l2[i];
            sli += out.linf[i];
            ++count;
        }
    }
    if (count > 0) {
        out.mean.theta_bar_deg = st / count;
        out.mean.l1 = sl1 / count;
        out.mean.l2 = sl2 / count;
        out.mean.linf = sli / count;
    }
    return out;
}

std::vector<double> local_variance_field(const NormalMap& n, int w) {
    const int h = n.height(), wd = n.width();
    std::vector<double> out(n.size(), 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < wd; ++c) {
            if (!n.valid(r, c)) continue;
            Vec3 mean{};
            long cnt = 0;
            for (int s = -w; s <= w; ++s)
                for (int t = -w; t <= w; ++t) {
                    const int rr = r + s, cc = c + t;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= wd || !n.valid(rr, cc)) continue;
                    mean += n.at(rr, cc);
                    ++cnt;
                }
            mean = mean * (1.0 / cnt);
            double acc = 0.0;
            for (int s = -w; s <= w; ++s)
                for (int t = -w; t <= w; ++t) {
                    const int rr = r + s, cc = c + t;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= wd || !n.valid(rr, cc)) continue;
                    acc += (n.at(rr, cc) - mean).squared_norm();
                }
            out[n.index(r, c)] = acc / cnt;
        }
    }
    return out;
}

}  // namespace normcraft::reference
