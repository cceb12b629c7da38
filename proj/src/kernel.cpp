#include "normcraft/kernel.hpp"

#include <cmath>

namespace normcraft {

Kernel::Kernel(int half_width, KernelKind kind, double sigma)
    : half_width_(half_width), kind_(kind), sigma_(sigma) {
    if (half_width < 1) throw InvalidParams("kernel half-width must be >= 1");
    const int n = size();
    taps1d_.assign(n, 0.0);
    if (kind == KernelKind::kAverage) {
        for (int i = 0; i < n; ++i) taps1d_[i] = 1.0 / n;
    } else {
        if (sigma <= 0.0) throw InvalidParams("gaussian kernel needs sigma > 0");
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = i - half_width;
            taps1d_[i] = std::exp(-d * d / (2.0 * sigma * sigma));
            sum += taps1d_[i];
        }
        for (double& t : taps1d_) t /= sum;
    }
    weights_.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            weights_[static_cast<std::size_t>(s) * n + t] = taps1d_[s] * taps1d_[t];
}

Kernel Kernel::gaussian(int half_width, double sigma) {
    if (sigma <= 0.0) sigma = half_width / 2.0;
    return Kernel(half_width, KernelKind::kGaussian, sigma);
}

Kernel Kernel::average(int half_width) {
    return Kernel(half_width, KernelKind::kAverage, 0.0);
}

std::string Kernel::describe() const {
    return kind_ == KernelKind::kGaussian ? "gauss" : "avg";
}

}  // namespace normcraft
