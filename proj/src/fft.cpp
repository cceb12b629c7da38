#include "normcraft/fft.hpp"

#include <algorithm>
#include <cmath>

namespace normcraft {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / double(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Chirp-z (Bluestein) for arbitrary lengths, reduced to a power-of-2 circular
// convolution. The k^2 twiddles are taken mod 2n to keep the angles exact.
void fft_bluestein(std::vector<std::complex<double>>& a, bool inverse) {
    const long long n = static_cast<long long>(a.size());
    std::size_t m = 1;
    while (m < static_cast<std::size_t>(2 * n - 1)) m <<= 1;

    std::vector<std::complex<double>> chirp(n);
    for (long long k = 0; k < n; ++k) {
        const long long kk = (k * k) % (2 * n);
        const double ang = kPi * double(kk) / double(n) * (inverse ? 1.0 : -1.0);
        chirp[k] = {std::cos(ang), std::sin(ang)};
    }

    // X_k = chirp_k * sum_j (a_j chirp_j) conj(chirp_{k-j}), via jk =
    // (j^2 + k^2 - (k-j)^2) / 2.
    std::vector<std::complex<double>> x(m), y(m);
    for (long long k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (long long k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);

    fft_pow2(x, false);
    fft_pow2(y, false);
    for (std::size_t i = 0; i < m; ++i) x[i] *= y[i];
    fft_pow2(x, true);

    for (long long k = 0; k < n; ++k)
        a[k] = x[k] * chirp[k] * (1.0 / double(m));
}

}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (is_pow2(n))
        fft_pow2(a, inverse);
    else
        fft_bluestein(a, inverse);
    if (inverse)
        for (auto& v : a) v *= 1.0 / double(n);
}

void fft2(std::vector<std::complex<double>>& a, int height, int width, bool inverse) {
    std::vector<std::complex<double>> line;
    line.reserve(std::max(height, width));
    for (int r = 0; r < height; ++r) {
        line.assign(a.begin() + static_cast<std::size_t>(r) * width,
                    a.begin() + static_cast<std::size_t>(r + 1) * width);
        fft(line, inverse);
        std::copy(line.begin(), line.end(), a.begin() + static_cast<std::size_t>(r) * width);
    }
    for (int c = 0; c < width; ++c) {
        line.resize(height);
        for (int r = 0; r < height; ++r) line[r] = a[static_cast<std::size_t>(r) * width + c];
        fft(line, inverse);
        for (int r = 0; r < height; ++r) a[static_cast<std::size_t>(r) * width + c] = line[r];
    }
}

}  // namespace normcraft
