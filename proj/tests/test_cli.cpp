#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "normcraft/decompose.hpp"
#include "normcraft/io.hpp"
#include "normcraft/metrics.hpp"

#include "fixtures.hpp"

using namespace normcraft;

namespace {

std::string cli() {
    const char* p = std::getenv("NORMCRAFT_CLI");
    REQUIRE_MESSAGE(p != nullptr, "NORMCRAFT_CLI not set");
    return p;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), int(buf.size()), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

struct Workspace {
    std::filesystem::path dir;
    Workspace() {
        dir = std::filesystem::temp_directory_path() /
              ("normcraft_cli_test." + std::to_string(::getpid()));
        std::filesystem::create_directory(dir);
    }
    ~Workspace() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

bool contains_line(const std::string& text, const std::string& line) {
    return text.find(line + "\n") != std::string::npos ||
           (text.size() >= line.size() &&
            text.compare(text.size() - line.size(), line.size(), line) == 0);
}

}  // namespace

TEST_CASE("evaluate of a map against itself prints exact zeros") {
    Workspace ws;
    const std::string x = ws.file("x.nrm");
    save_normal_map(fixtures::bump_plane(24, 24), x);
    const RunResult r = run("evaluate " + x + " " + x);
    CHECK(r.exit_code == 0);
    CHECK(contains_line(r.out, "mae_deg=0.000000"));
    CHECK(contains_line(r.out, "ssim=1.000000"));
}

TEST_CASE("decompose then transfer reconstructs the input") {
    Workspace ws;
    const std::string in = ws.file("in.nrm"), shape = ws.file("shape.nrm"),
                      detail = ws.file("detail.nrm"), out = ws.file("out.nrm");
    save_normal_map(fixtures::bumpy_hemisphere(48, 48), in);

    CHECK(run("decompose " + in + " --w 5 --kernel gauss -o-shape " + shape +
              " -o-detail " + detail)
              .exit_code == 0);
    CHECK(run("transfer --detail " + detail + " --shape " + shape + " -o " + out)
              .exit_code == 0);

    const RunResult ev = run("evaluate " + in + " " + out);
    CHECK(ev.exit_code == 0);
    // recomposition identity holds to 1e-6 degrees through float32 files
    const auto pos = ev.out.find("mae_deg=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(ev.out.substr(pos + 8)) <= 1e-6);

    // CLI output is byte-identical to the library path (thin-shell contract):
    // the library mirror consumes the same files the CLI wrote
    const NormalMap lib_in = load_normal_map(in);
    const Kernel k = Kernel::gaussian(5);
    const NormalMap lib_shape = decompose(lib_in, k).shape;
    const std::string lib_shape_path = ws.file("lib_shape.nrm");
    save_normal_map(lib_shape, lib_shape_path);
    std::ifstream a(lib_shape_path, std::ios::binary), b(shape, std::ios::binary);
    const std::string abytes((std::istreambuf_iterator<char>(a)),
                             std::istreambuf_iterator<char>());
    const std::string bbytes((std::istreambuf_iterator<char>(b)),
                             std::istreambuf_iterator<char>());
    CHECK(abytes == bbytes);
    CHECK(mae(load_normal_map(shape), load_normal_map(lib_shape_path)) == 0.0);
}

TEST_CASE("upsample dimension contract") {
    Workspace ws;
    const std::string in = ws.file("small.nrm"), out = ws.file("big.nrm");
    save_normal_map(fixtures::bumpy_hemisphere(64, 64), in);
    const RunResult r = run("upsample " + in + " --factor 4 --w 5 -o " + out);
    CHECK(r.exit_code == 0);
    const NormalMap up = load_normal_map(out);
    CHECK(up.width() == 256);
    CHECK(up.height() == 256);
}

TEST_CASE("synthesize is reproducible from the seed") {
    Workspace ws;
    const std::string sw = ws.file("swatch.nrm");
    const std::string o1 = ws.file("syn1.nrm"), o2 = ws.file("syn2.nrm");
    const Kernel k = Kernel::gaussian(5);
    save_normal_map(decompose(fixtures::bump_plane(32, 32, 1.2, 8.0), k).detail, sw);

    const std::string args = "synthesize --swatch " + sw +
                             " --width 40 --height 40 --window 9 --seed 42 -o ";
    CHECK(run(args + o1).exit_code == 0);
    CHECK(run(args + o2).exit_code == 0);
    std::ifstream a(o1, std::ios::binary), b(o2, std::ios::binary);
    const std::string abytes((std::istreambuf_iterator<char>(a)),
                             std::istreambuf_iterator<char>());
    const std::string bbytes((std::istreambuf_iterator<char>(b)),
                             std::istreambuf_iterator<char>());
    CHECK(!abytes.empty());
    CHECK(abytes == bbytes);
}

TEST_CASE("integrate produces depth and mesh outputs") {
    Workspace ws;
    const std::string in = ws.file("hemi.nrm"), dep = ws.file("z.dep"),
                      obj = ws.file("mesh.obj");
    save_normal_map(fixtures::hemisphere_frame(32, 32), in);
    const RunResult r =
        run("integrate " + in + " --solver frankot -o-depth " + dep + " -o-obj " + obj +
            " --scale 0.5");
    CHECK(r.exit_code == 0);
    CHECK(std::filesystem::file_size(dep) == 16 + 32 * 32 * 4);
    std::ifstream o(obj);
    std::string first;
    std::getline(o, first);
    CHECK(first.substr(0, 2) == "v ");

    // poisson works on masked input where frankot refuses
    const std::string disk = ws.file("disk.nrm");
    save_normal_map(fixtures::hemisphere_disk(24), disk);
    CHECK(run("integrate " + disk + " --solver frankot -o-depth " + dep).exit_code == 2);
    CHECK(run("integrate " + disk + " --solver poisson -o-depth " + dep).exit_code == 0);
}

TEST_CASE("region flag drives local transfer") {
    Workspace ws;
    const Kernel k = Kernel::gaussian(5);
    const std::string detail = ws.file("detail.nrm"), shape = ws.file("shape.nrm"),
                      region = ws.file("region.nrm"), out = ws.file("out.nrm");
    save_normal_map(decompose(fixtures::bump_plane(32, 32), k).detail, detail);
    save_normal_map(fixtures::hemisphere_frame(96, 96), shape);

    NormalMap region_map(96, 96, kAxisZ, false);
    for (int r = 30; r < 62; ++r)
        for (int c = 30; c < 62; ++c) region_map.set(r, c, kAxisZ);
    save_normal_map(region_map, region);

    const RunResult r = run("transfer --detail " + detail + " --shape " + shape +
                            " --region " + region + " -o " + out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("local=true") != std::string::npos);
}

TEST_CASE("exit codes for bad invocations") {
    Workspace ws;
    const std::string x = ws.file("x.nrm");
    save_normal_map(fixtures::bump_plane(8, 8), x);

    // 1: usage errors
    CHECK(run("").exit_code == 1);
    CHECK(run("frobnicate").exit_code == 1);
    CHECK(run("evaluate " + x).exit_code == 1);
    CHECK(run("evaluate " + x + " " + x + " --metric bogus").exit_code == 1);
    CHECK(run("decompose " + x + " --w five -o-shape a -o-detail b").exit_code == 1);
    CHECK(run("decompose " + x).exit_code == 1);  // missing outputs

    // 2: data errors
    const std::string bad = ws.file("bad.nrm");
    {
        std::ofstream s(bad, std::ios::binary);
        s << "NRM1 garbage";
    }
    CHECK(run("evaluate " + bad + " " + x).exit_code == 2);
    CHECK(run("evaluate " + ws.file("missing.nrm") + " " + x).exit_code == 2);

    const std::string y = ws.file("y.nrm");
    save_normal_map(fixtures::bump_plane(9, 9), y);
    CHECK(run("evaluate " + x + " " + y).exit_code == 2);  // dimension mismatch

    // disjoint masks: empty overlap
    NormalMap half_a(8, 8), half_b(8, 8);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            if (r < 4) half_a.set_invalid(r, c);
            if (r >= 4) half_b.set_invalid(r, c);
        }
    const std::string pa = ws.file("a.nrm"), pb = ws.file("b.nrm");
    save_normal_map(half_a, pa);
    save_normal_map(half_b, pb);
    CHECK(run("evaluate " + pa + " " + pb).exit_code == 2);

    // 3: numeric failure (enhancer cannot be executed)
    const std::string out = ws.file("up.nrm");
    CHECK(run("upsample " + x + " --factor 2 --detail-cmd /nonexistent/prog -o " + out)
              .exit_code == 3);
}

TEST_CASE("tile flag and thread cap are honored") {
    Workspace ws;
    const std::string detail = ws.file("d.nrm"), shape = ws.file("s.nrm"),
                      out = ws.file("o.nrm");
    save_normal_map(fixtures::bump_plane(16, 16), detail);
    save_normal_map(fixtures::constant_map(48, 48), shape);

    // without tiling the undersized source is a data error
    CHECK(run("transfer --detail " + detail + " --shape " + shape + " -o " + out)
              .exit_code == 2);
    CHECK(run("transfer --detail " + detail + " --shape " + shape + " --tile -o " + out)
              .exit_code == 0);

    // NORMCRAFT_THREADS caps the worker pool without changing results
    const std::string capped = ws.file("capped.nrm");
    const std::string cmd = "NORMCRAFT_THREADS=1 " + cli() + " transfer --detail " + detail +
                            " --shape " + shape + " --tile -o " + capped + " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::ifstream a(out, std::ios::binary), b(capped, std::ios::binary);
    const std::string abytes((std::istreambuf_iterator<char>(a)),
                             std::istreambuf_iterator<char>());
    const std::string bbytes((std::istreambuf_iterator<char>(b)),
                             std::istreambuf_iterator<char>());
    CHECK(abytes == bbytes);
}

TEST_CASE("upsample with the external enhancer stub") {
    const char* stub = std::getenv("NORMCRAFT_ENHANCER");
    REQUIRE_MESSAGE(stub != nullptr, "NORMCRAFT_ENHANCER not set");
    Workspace ws;
    const std::string in = ws.file("in.nrm"), out = ws.file("out.nrm");
    save_normal_map(fixtures::bumpy_hemisphere(24, 24), in);
    const RunResult r = run("upsample " + in + " --factor 2 --detail-cmd " +
                            std::string(stub) + " -o " + out);
    CHECK(r.exit_code == 0);
    const NormalMap up = load_normal_map(out);
    CHECK(up.width() == 48);
    for (int row = 0; row < up.height(); ++row)
        for (int col = 0; col < up.width(); ++col)
            CHECK(std::abs(up.at(row, col).norm() - 1.0) < 1e-9);
}

TEST_CASE("help prints the defaults") {
    const RunResult r = run("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("w=5") != std::string::npos);
    CHECK(r.out.find("kernel=gauss") != std::string::npos);
    CHECK(r.out.find("window=11") != std::string::npos);
    CHECK(r.out.find("tol=0.1") != std::string::npos);
}

TEST_CASE("reports embed the parameter set") {
    Workspace ws;
    const std::string x = ws.file("x.nrm");
    save_normal_map(fixtures::bumpy_hemisphere(32, 32), x);
    const std::string shape = ws.file("s.nrm"), detail = ws.file("d.nrm"),
                      rep = ws.file("report.json");
    const RunResult r = run("decompose " + x + " --w 7 --kernel gauss -o-shape " + shape +
                            " -o-detail " + detail + " --report " + rep);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("w=7") != std::string::npos);
    CHECK(r.out.find("sigma=3.5") != std::string::npos);
    std::ifstream jf(rep);
    const std::string jtext((std::istreambuf_iterator<char>(jf)),
                            std::istreambuf_iterator<char>());
    CHECK(jtext.find("\"w\"") != std::string::npos);
    CHECK(jtext.find("\"kernel\"") != std::string::npos);
}
