#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "normcraft/transfer.hpp"

#include "fixtures.hpp"

using namespace normcraft;

namespace {

double max_component_diff(const NormalMap& a, const NormalMap& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec3 d = a.data()[i] - b.data()[i];
        m = std::max({m, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
    }
    return m;
}

}  // namespace

TEST_CASE("transferring a flat detail reproduces the target shape") {
    TransferRequest req;
    req.source_detail = fixtures::constant_map(32, 32);
    req.target_shape = fixtures::hemisphere_frame(32, 32);
    const TransferResult res = transfer(req, Kernel::gaussian(5));
    CHECK(max_component_diff(res.output, req.target_shape) < 1e-12);
}

TEST_CASE("a flat target returns the source detail untouched") {
    TransferRequest req;
    req.source_detail = fixtures::bump_plane(32, 32);
    req.target_shape = fixtures::constant_map(32, 32);
    const TransferResult res = transfer(req, Kernel::gaussian(5));
    CHECK(max_component_diff(res.output, req.source_detail) == 0.0);
}

TEST_CASE("bump detail onto a hemisphere keeps both shape and detail") {
    const Kernel k = Kernel::gaussian(5);
    const NormalMap source = fixtures::bump_plane(128, 128, 0.5, 6.0);
    TransferRequest req;
    req.source_detail = decompose(source, k).detail;
    req.target_shape = fixtures::hemisphere_frame(128, 128, 2.0);
    const TransferResult res = transfer(req, k);
    CHECK(res.detail_ssim >= 0.99);
    CHECK(res.shape_mae_deg <= 3.0);
}

TEST_CASE("transfer is per-pixel local") {
    const Kernel k = Kernel::gaussian(5);
    TransferRequest req;
    req.source_detail = fixtures::bump_plane(24, 24);
    req.target_shape = fixtures::hemisphere_frame(24, 24);
    const NormalMap base = transfer(req, k).output;

    req.source_detail.at(11, 7) = Vec3{0.3, -0.2, 1.0}.normalized();
    const NormalMap poked = transfer(req, k).output;

    int changed = 0;
    for (int r = 0; r < 24; ++r)
        for (int c = 0; c < 24; ++c)
            if (!(base.at(r, c) == poked.at(r, c))) ++changed;
    CHECK(changed == 1);
    CHECK(!(base.at(11, 7) == poked.at(11, 7)));
}

TEST_CASE("wrap tiling replicates a small swatch") {
    TransferRequest req;
    req.source_detail = fixtures::bump_plane(16, 16);
    req.target_shape = fixtures::constant_map(48, 48);
    req.tiling = Tiling::kWrap;
    const TransferResult res = transfer(req, Kernel::gaussian(5));
    for (int r = 0; r < 48; ++r)
        for (int c = 0; c < 48; ++c)
            CHECK((res.output.at(r, c) - req.source_detail.at(r % 16, c % 16)).norm() == 0.0);
}

TEST_CASE("missing tiling on an undersized source is rejected") {
    TransferRequest req;
    req.source_detail = fixtures::bump_plane(16, 16);
    req.target_shape = fixtures::constant_map(48, 48);
    CHECK_THROWS_AS(transfer(req, Kernel::gaussian(5)), DimensionMismatch);
}

TEST_CASE("region must stay inside the target mask") {
    TransferRequest req;
    req.source_detail = fixtures::bump_plane(16, 16);
    NormalMap tgt = fixtures::constant_map(16, 16);
    tgt.set_invalid(4, 4);
    std::vector<std::uint8_t> region(tgt.size(), 0);
    region[tgt.index(4, 4)] = 1;
    req.target_shape = tgt;
    req.region = region;
    CHECK_THROWS_AS(transfer(req, Kernel::gaussian(5)), RegionOutOfBounds);
}

TEST_CASE("local transfer with the full mask equals global transfer") {
    const Kernel k = Kernel::gaussian(5);
    const NormalMap source = fixtures::bump_plane(48, 48);
    TransferRequest req;
    req.source_detail = decompose(source, k).detail;
    req.target_shape = fixtures::hemisphere_frame(48, 48);
    req.region = req.target_shape.mask();
    const TransferResult local = local_transfer(req, k);

    TransferRequest global_req = req;
    global_req.region.reset();
    const TransferResult global = transfer(global_req, k);
    CHECK(max_component_diff(local.output, global.output) == 0.0);
    CHECK(local.detail_ssim == global.detail_ssim);
}

TEST_CASE("local transfer with an empty region returns the target") {
    TransferRequest req;
    req.source_detail = fixtures::bump_plane(32, 32);
    req.target_shape = fixtures::hemisphere_frame(32, 32);
    req.region = std::vector<std::uint8_t>(req.target_shape.size(), 0);
    const TransferResult res = local_transfer(req, Kernel::gaussian(5));
    CHECK(max_component_diff(res.output, req.target_shape) == 0.0);
}

TEST_CASE("coarse patch into a larger target keeps the region faithful") {
    const Kernel coarse = Kernel::gaussian(10);
    const NormalMap source = fixtures::bump_plane(32, 32, 0.7, 10.0);
    const NormalMap patch_detail = decompose(source, coarse).detail;

    NormalMap target = fixtures::hemisphere_frame(128, 128);
    std::vector<std::uint8_t> region(target.size(), 0);
    for (int r = 48; r < 80; ++r)
        for (int c = 48; c < 80; ++c) region[target.index(r, c)] = 1;

    TransferRequest req;
    req.source_detail = patch_detail;
    req.target_shape = target;
    req.region = region;  // the 32x32 patch anchors at the region origin
    const TransferResult res = local_transfer(req, coarse);
    CHECK(res.detail_ssim >= 0.98);

    // outside the feather band the target is untouched
    const int b = 2 * coarse.half_width();
    for (int r = 0; r < 128; ++r)
        for (int c = 0; c < 128; ++c) {
            const bool near = r >= 48 - b && r < 80 + b && c >= 48 - b && c < 80 + b;
            if (near) continue;
            CHECK((res.output.at(r, c) - target.at(r, c)).norm() == 0.0);
        }
}

TEST_CASE("local transfer requires a region") {
    TransferRequest req;
    req.source_detail = fixtures::bump_plane(16, 16);
    req.target_shape = fixtures::constant_map(16, 16);
    CHECK_THROWS_AS(local_transfer(req, Kernel::gaussian(5)), InvalidParams);
}

TEST_CASE("roundtrip chain: identity hop on a flat shape is lossless") {
    const NormalMap detail = fixtures::constant_map(32, 32);
    const auto reports = transfer_roundtrip_chain(
        detail, {fixtures::constant_map(32, 32)}, Kernel::gaussian(5));
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].ssim == 1.0);
    CHECK(reports[0].mae_deg == 0.0);
}

TEST_CASE("roundtrip chain over ten shapes decays slowly") {
    const Kernel k = Kernel::gaussian(5);
    const NormalMap source = fixtures::bump_plane(96, 96, 0.5, 6.0);
    const NormalMap detail = decompose(source, k).detail;

    // descending radius: each hop's target is at least as curved as the last,
    // so the per-hop measurement distortion never shrinks
    std::vector<NormalMap> shapes;
    for (int i = 0; i < 10; ++i)
        shapes.push_back(fixtures::hemisphere_frame(96, 96, 4.3 - 0.2 * i));
    const auto reports = transfer_roundtrip_chain(detail, shapes, k);
    REQUIRE(reports.size() == 10);
    CHECK(reports.back().ssim >= 0.99);
    CHECK(reports.back().mae_deg <= 5.0);
    for (std::size_t i = 1; i < reports.size(); ++i)
        CHECK(reports[i].ssim <= reports[i - 1].ssim + 1e-4);
}
