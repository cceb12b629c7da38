#include "normcraft/normal_map.hpp"

#include <string>

namespace normcraft {

NormalMap normalize_map(const NormalMap& raw) {
    NormalMap out = raw;
    const int h = raw.height(), w = raw.width();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!raw.valid(r, c)) continue;
            const Vec3& v = raw.at(r, c);
            const double n = v.norm();
            if (n < 1e-8)
                throw DegeneratePixel("normalize_map: near-zero normal at (" +
                                      std::to_string(r) + "," + std::to_string(c) + ")");
            out.at(r, c) = v * (1.0 / n);
        }
    }
    return out;
}

}  // namespace normcraft
