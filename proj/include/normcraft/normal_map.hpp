#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "normcraft/errors.hpp"
#include "normcraft/vec3.hpp"

namespace normcraft {

// H x W grid of unit 3-vectors with a validity mask. Invalid pixels carry a
// zero vector and are excluded from every statistic and convolution. The same
// type plays all the roles in the pipeline: input map, shape component,
// detail component, transferred result.
class NormalMap {
public:
    NormalMap() = default;

    NormalMap(int width, int height, Vec3 fill = kAxisZ, bool valid = true)
        : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw InvalidParams("normal map dimensions must be at least 1x1");
        data_.assign(static_cast<std::size_t>(width) * height, valid ? fill : Vec3{});
        mask_.assign(data_.size(), valid ? 1 : 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * width_ + c;
    }

    const Vec3& at(int r, int c) const { return data_[index(r, c)]; }
    Vec3& at(int r, int c) { return data_[index(r, c)]; }

    bool valid(int r, int c) const { return mask_[index(r, c)] != 0; }

    void set(int r, int c, const Vec3& v) {
        data_[index(r, c)] = v;
        mask_[index(r, c)] = 1;
    }

    void set_invalid(int r, int c) {
        data_[index(r, c)] = Vec3{};
        mask_[index(r, c)] = 0;
    }

    const std::vector<Vec3>& data() const { return data_; }
    std::vector<Vec3>& data() { return data_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::vector<std::uint8_t>& mask() { return mask_; }

    long valid_count() const {
        long n = 0;
        for (auto m : mask_) n += m != 0;
        return n;
    }

    bool same_dims(const NormalMap& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Vec3> data_;
    std::vector<std::uint8_t> mask_;
};

// Rescales every valid pixel to unit length, preserving direction.
// Throws DegeneratePixel (with coordinates in the message) when a valid pixel
// is shorter than 1e-8.
NormalMap normalize_map(const NormalMap& raw);

}  // namespace normcraft
