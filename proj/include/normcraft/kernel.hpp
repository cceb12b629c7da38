#pragma once

#include <string>
#include <vector>

#include "normcraft/errors.hpp"

namespace normcraft {

enum class KernelKind { kGaussian, kAverage };

// Low-pass convolution kernel with half-width w: a (2w+1) x (2w+1) grid of
// nonnegative weights summing to one. Both kinds factor into identical row
// and column passes, which the fast convolution path exploits.
class Kernel {
public:
    // sigma <= 0 selects the default sigma = w / 2.
    static Kernel gaussian(int half_width, double sigma = 0.0);
    static Kernel average(int half_width);

    int half_width() const { return half_width_; }
    int size() const { return 2 * half_width_ + 1; }
    KernelKind kind() const { return kind_; }
    double sigma() const { return sigma_; }

    // s, t in [-w, w]
    double at(int s, int t) const {
        return weights_[static_cast<std::size_t>(s + half_width_) * size() +
                        (t + half_width_)];
    }
    double tap1d(int s) const { return taps1d_[s + half_width_]; }

    const std::vector<double>& weights() const { return weights_; }

    std::string describe() const;  // "gauss" or "avg"

private:
    Kernel(int half_width, KernelKind kind, double sigma);

    int half_width_;
    KernelKind kind_;
    double sigma_;                  // 0 for average kernels
    std::vector<double> taps1d_;    // separable factor, sums to 1
    std::vector<double> weights_;   // full 2-D grid, sums to 1
};

}  // namespace normcraft
