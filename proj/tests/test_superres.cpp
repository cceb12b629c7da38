#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "normcraft/metrics.hpp"
#include "normcraft/superres.hpp"

#include "fixtures.hpp"

using namespace normcraft;

namespace {

std::string enhancer_path() {
    const char* p = std::getenv("NORMCRAFT_ENHANCER");
    return p ? p : "";
}

}  // namespace

TEST_CASE("constant map upsamples to a constant map of scaled size") {
    const NormalMap m = fixtures::constant_map(16, 12, Vec3{0.2, 0.1, 1.0}.normalized());
    const NormalMap up = upsample(m, UpsampleSpec{}, Kernel::gaussian(5));
    CHECK(up.width() == 64);
    CHECK(up.height() == 48);
    for (const Vec3& v : up.data()) CHECK((v - m.at(0, 0)).norm() < 1e-9);
}

TEST_CASE("factor validation and mask scaling") {
    const NormalMap m = fixtures::constant_map(8, 8);
    UpsampleSpec spec;
    spec.factor = 5;
    CHECK_THROWS_AS(upsample(m, spec, Kernel::gaussian(5)), InvalidParams);

    NormalMap masked = fixtures::hemisphere_frame(10, 10);
    masked.set_invalid(3, 4);
    spec.factor = 2;
    const NormalMap up = upsample(masked, spec, Kernel::gaussian(3));
    CHECK(up.width() == 20);
    CHECK(up.height() == 20);
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 20; ++c)
            CHECK(up.valid(r, c) == masked.valid(r / 2, c / 2));
}

TEST_CASE("smooth hemisphere survives a down/up round trip") {
    const NormalMap original = fixtures::hemisphere_frame(128, 128);
    const NormalMap low = downsample_box(original, 2);
    UpsampleSpec spec;
    spec.factor = 2;
    const NormalMap up = upsample(low, spec, Kernel::gaussian(5));
    CHECK(mae(up, original) <= 2.0);
}

TEST_CASE("shape branch is preserved by the decomposed pipeline") {
    const Kernel k = Kernel::gaussian(5);
    const NormalMap m = fixtures::hemisphere_frame(64, 64, 1.5);
    UpsampleSpec spec;
    spec.factor = 2;
    const NormalMap up = upsample(m, spec, k);
    const NormalMap up_shape = shape_component(up, k);
    const NormalMap expected_shape = bicubic_upsample(shape_component(m, k), 2);
    CHECK(mae(up_shape, expected_shape) <= 1.0);
}

TEST_CASE("decomposed upsampling beats whole-map bicubic on detail-rich input") {
    const NormalMap pristine = fixtures::bumpy_hemisphere(128, 128, 1.02, 3.0, 20.0);
    const NormalMap low = downsample_box(pristine, 4);

    UpsampleSpec spec;
    spec.factor = 4;
    const NormalMap ours = upsample(low, spec, Kernel::gaussian(5));
    const NormalMap naive = bicubic_upsample(low, 4);

    const double ours_mae = mae(ours, pristine);
    const double naive_mae = mae(naive, pristine);
    CHECK(ours_mae < naive_mae);
    CHECK(ours_mae <= 6.0);
    // and across gentler fixtures it never loses by more than a tenth degree
    for (double rs : {1.3, 2.0}) {
        const NormalMap q = fixtures::bumpy_hemisphere(128, 128, rs, 1.5, 24.0);
        const NormalMap lowq = downsample_box(q, 4);
        CHECK(mae(upsample(lowq, spec, Kernel::gaussian(5)), q) <=
              mae(bicubic_upsample(lowq, 4), q) + 0.1);
    }
}

TEST_CASE("external enhancer runs through the subprocess contract") {
    const std::string stub = enhancer_path();
    REQUIRE_MESSAGE(!stub.empty(), "NORMCRAFT_ENHANCER not set");

    const Kernel k = Kernel::gaussian(5);
    const NormalMap detail = decompose(fixtures::bump_plane(24, 24), k).detail;

    // identity pass-through at factor 1
    const NormalMap same = run_external_enhancer(detail, 1, stub);
    CHECK(mae(same, detail) <= 1e-6 * 180.0 / 3.141592653589793);

    // nearest neighbor at factor 2: constant 2x2 blocks
    const NormalMap up = run_external_enhancer(detail, 2, stub);
    REQUIRE(up.width() == 48);
    REQUIRE(up.height() == 48);
    for (int r = 0; r < 48; ++r)
        for (int c = 0; c < 48; ++c)
            CHECK((up.at(r, c) - up.at(r - r % 2, c - c % 2)).norm() == 0.0);

    // full pipeline with the external detail branch
    UpsampleSpec spec;
    spec.factor = 2;
    spec.detail_method = DetailUpsampler::kExternal;
    spec.external_cmd = stub;
    const NormalMap out = upsample(fixtures::bumpy_hemisphere(32, 32), spec, k);
    CHECK(out.width() == 64);
}

TEST_CASE("enhancer failure paths") {
    const Kernel k = Kernel::gaussian(3);
    const NormalMap detail = decompose(fixtures::bump_plane(16, 16), k).detail;

    CHECK_THROWS_AS(run_external_enhancer(detail, 2, "/nonexistent/enhancer"),
                    ExternalEnhancerFailed);

    // a "successful" enhancer that produces wrong output dimensions
    const std::string script = "/tmp/normcraft_bad_enhancer.sh";
    {
        std::ofstream s(script);
        s << "#!/bin/sh\ncp \"$1\" \"$2\"\n";
    }
    REQUIRE(std::system(("chmod +x " + script).c_str()) == 0);
    CHECK_THROWS_AS(run_external_enhancer(detail, 2, script), ExternalEnhancerFailed);

    // and one that exits nonzero
    const std::string failing = "/tmp/normcraft_failing_enhancer.sh";
    {
        std::ofstream s(failing);
        s << "#!/bin/sh\necho boom >&2\nexit 9\n";
    }
    REQUIRE(std::system(("chmod +x " + failing).c_str()) == 0);
    try {
        run_external_enhancer(detail, 2, failing);
        CHECK(false);
    } catch (const ExternalEnhancerFailed& e) {
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }

    // and one that hangs past the timeout
    const std::string hanging = "/tmp/normcraft_hanging_enhancer.sh";
    {
        std::ofstream s(hanging);
        s << "#!/bin/sh\nsleep 30\n";
    }
    REQUIRE(std::system(("chmod +x " + hanging).c_str()) == 0);
    try {
        run_external_enhancer(detail, 2, hanging, 0.2);
        CHECK(false);
    } catch (const ExternalEnhancerFailed& e) {
        CHECK(std::string(e.what()).find("timed out") != std::string::npos);
    }
}

TEST_CASE("downsample_box validation") {
    CHECK_THROWS_AS(downsample_box(fixtures::constant_map(9, 9), 2), InvalidParams);
}
