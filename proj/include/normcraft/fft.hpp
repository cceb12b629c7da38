#pragma once

#include <complex>
#include <vector>

namespace normcraft {

// In-place forward/inverse DFT, any length (radix-2 for powers of two,
// Bluestein otherwise). Inverse includes the 1/n factor.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Row-major 2-D transform.
void fft2(std::vector<std::complex<double>>& a, int height, int width, bool inverse);

}  // namespace normcraft
