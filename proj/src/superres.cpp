#include "normcraft/superres.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "normcraft/io.hpp"

namespace normcraft {

namespace {

void check_factor(int factor) {
    if (factor != 2 && factor != 3 && factor != 4 && factor != 8)
        throw InvalidParams("upsample: factor must be one of 2, 3, 4, 8");
}

double cubic_weight(double x) {
    // Keys kernel, a = -0.5.
    x = std::abs(x);
    if (x <= 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
    if (x < 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
    return 0.0;
}

// Replaces invalid values with the nearest valid one (chessboard metric) so
// interpolation taps never read the zero filler; the output keeps the
// nearest-neighbor scaled mask anyway.
std::vector<Vec3> fill_invalid(const NormalMap& n) {
    std::vector<Vec3> vals = n.data();
    std::vector<int> dist(n.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n.size(); ++i)
        if (n.mask()[i]) {
            dist[i] = 0;
            queue.push_back(i);
        }
    const int h = n.height(), w = n.width();
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        const int r = int(i) / w, c = int(i) % w;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                const std::size_t j = n.index(rr, cc);
                if (dist[j] >= 0) continue;
                dist[j] = dist[i] + 1;
                vals[j] = vals[i];
                queue.push_back(j);
            }
    }
    return vals;
}

std::vector<std::uint8_t> scale_mask_nearest(const NormalMap& n, int factor) {
    const int oh = n.height() * factor, ow = n.width() * factor;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(oh) * ow);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c)
            mask[static_cast<std::size_t>(r) * ow + c] = n.mask()[n.index(r / factor, c / factor)];
    return mask;
}

}  // namespace

NormalMap bicubic_upsample(const NormalMap& n, int factor) {
    if (factor < 1) throw InvalidParams("bicubic_upsample: factor must be >= 1");
    const int h = n.height(), w = n.width();
    const int oh = h * factor, ow = w * factor;
    const std::vector<Vec3> vals = fill_invalid(n);

    NormalMap out(ow, oh);
    out.mask() = scale_mask_nearest(n, factor);

    int degenerate = 0;
#pragma omp parallel for reduction(+ : degenerate)
    for (int r = 0; r < oh; ++r) {
        const double sy = (r + 0.5) / factor - 0.5;
        const int y0 = static_cast<int>(std::floor(sy));
        double wy[4];
        for (int i = 0; i < 4; ++i) wy[i] = cubic_weight(sy - (y0 - 1 + i));
        for (int c = 0; c < ow; ++c) {
            if (!out.mask()[out.index(r, c)]) {
                out.at(r, c) = Vec3{};
                continue;
            }
            const double sx = (c + 0.5) / factor - 0.5;
            const int x0 = static_cast<int>(std::floor(sx));
            double wx[4];
            for (int i = 0; i < 4; ++i) wx[i] = cubic_weight(sx - (x0 - 1 + i));
            Vec3 acc{};
            for (int i = 0; i < 4; ++i) {
                const int rr = std::clamp(y0 - 1 + i, 0, h - 1);
                for (int j = 0; j < 4; ++j) {
                    const int cc = std::clamp(x0 - 1 + j, 0, w - 1);
                    acc += vals[static_cast<std::size_t>(rr) * w + cc] * (wy[i] * wx[j]);
                }
            }
            const double len = acc.norm();
            if (len < 1e-12) {
                ++degenerate;
                out.at(r, c) = kAxisZ;
                continue;
            }
            out.at(r, c) = acc * (1.0 / len);
        }
    }
    if (degenerate > 0)
        throw DegeneratePixel("bicubic_upsample: " + std::to_string(degenerate) +
                              " interpolated normals cancelled");
    return out;
}

NormalMap nearest_upsample(const NormalMap& n, int factor) {
    if (factor < 1) throw InvalidParams("nearest_upsample: factor must be >= 1");
    const int oh = n.height() * factor, ow = n.width() * factor;
    NormalMap out(ow, oh);
    out.mask() = scale_mask_nearest(n, factor);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c)
            out.at(r, c) = n.at(r / factor, c / factor);
    return out;
}

NormalMap downsample_box(const NormalMap& n, int factor) {
    if (factor < 1) throw InvalidParams("downsample_box: factor must be >= 1");
    if (n.width() % factor != 0 || n.height() % factor != 0)
        throw InvalidParams("downsample_box: dimensions not divisible by factor");
    const int oh = n.height() / factor, ow = n.width() / factor;
    NormalMap out(ow, oh);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c) {
            Vec3 acc{};
            int cnt = 0;
            for (int s = 0; s < factor; ++s)
                for (int t = 0; t < factor; ++t) {
                    if (!n.valid(r * factor + s, c * factor + t)) continue;
                    acc += n.at(r * factor + s, c * factor + t);
                    ++cnt;
                }
            if (cnt == 0 || acc.norm() < 1e-12) {
                out.set_invalid(r, c);
                continue;
            }
            out.at(r, c) = acc.normalized();
        }
    return out;
}

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / (tag + "." + std::to_string(::getpid()) + "." +
                                     std::to_string(attempt));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw DataError("cannot create scratch directory under " + base.string());
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

std::string read_tail(const std::filesystem::path& p, std::size_t max_bytes = 512) {
    std::ifstream in(p, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (s.size() > max_bytes) s = "..." + s.substr(s.size() - max_bytes);
    return s;
}

}  // namespace

NormalMap run_external_enhancer(const NormalMap& detail, int factor,
                                const std::string& cmd, double timeout_sec) {
    if (factor < 1) throw InvalidParams("run_external_enhancer: factor must be >= 1");
    TempDir dir("normcraft-enhancer");
    const auto in_path = dir.path / "detail_in.nrm";
    const auto out_path = dir.path / "detail_out.nrm";
    const auto err_path = dir.path / "stderr.txt";
    save_nrm(detail, in_path.string());

    const pid_t pid = fork();
    if (pid < 0) throw ExternalEnhancerFailed("enhancer: fork failed");
    if (pid == 0) {
        // detach from the parent's stdio so stray grandchildren cannot hold
        // our caller's pipes open
        const int fd = open(err_path.c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0644);
        if (fd >= 0) {
            dup2(fd, 1);
            dup2(fd, 2);
            close(fd);
        }
        const std::string factor_str = std::to_string(factor);
        execlp(cmd.c_str(), cmd.c_str(), in_path.c_str(), out_path.c_str(),
               factor_str.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_sec);
    int status = 0;
    for (;;) {
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0) throw ExternalEnhancerFailed("enhancer: waitpid failed");
        if (std::chrono::steady_clock::now() > deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            throw ExternalEnhancerFailed("enhancer '" + cmd + "' timed out after " +
                                         std::to_string(timeout_sec) + " s");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        throw ExternalEnhancerFailed("enhancer '" + cmd + "' failed (exit " +
                                     std::to_string(code) + "): " + read_tail(err_path));
    }

    NormalMap result;
    try {
        result = load_nrm(out_path.string());
    } catch (const Error& e) {
        throw ExternalEnhancerFailed(std::string("enhancer output unreadable: ") + e.what());
    }
    if (result.width() != detail.width() * factor || result.height() != detail.height() * factor)
        throw ExternalEnhancerFailed(
            "enhancer output is " + std::to_string(result.width()) + "x" +
            std::to_string(result.height()) + ", expected " +
            std::to_string(detail.width() * factor) + "x" +
            std::to_string(detail.height() * factor));
    return result;
}

NormalMap upsample(const NormalMap& n, const UpsampleSpec& spec, const Kernel& k) {
    check_factor(spec.factor);
    if (spec.detail_method == DetailUpsampler::kExternal && spec.external_cmd.empty())
        throw InvalidParams("upsample: external detail method needs a command");

    Decomposition dec = decompose(n, k);
    NormalMap shape_up = bicubic_upsample(dec.shape, spec.factor);
    NormalMap detail_up =
        spec.detail_method == DetailUpsampler::kBicubic
            ? bicubic_upsample(dec.detail, spec.factor)
            : run_external_enhancer(dec.detail, spec.factor, spec.external_cmd,
                                    spec.timeout_sec);
    if (!detail_up.same_dims(shape_up))
        throw ExternalEnhancerFailed("upsample: detail/shape dimensions diverge");
    return recompose(shape_up, detail_up);
}

}  // namespace normcraft
