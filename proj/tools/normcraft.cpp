#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "normcraft/decompose.hpp"
#include "normcraft/integrate.hpp"
#include "normcraft/io.hpp"
#include "normcraft/metrics.hpp"
#include "normcraft/parallel.hpp"
#include "normcraft/superres.hpp"
#include "normcraft/synthesis.hpp"
#include "normcraft/transfer.hpp"

namespace {

using normcraft::Kernel;
using normcraft::NormalMap;

constexpr const char* kUsage = R"(normcraft - shape/detail processing of normal maps

usage: normcraft <subcommand> [options]

subcommands:
  decompose IN --w W --kernel {gauss|avg} -o-shape S -o-detail D
  transfer --detail D --shape S [--region MASK] [--tile] -o OUT [--report R]
  synthesize --swatch SW --width W --height H [--window K --tol T --seed N] -o OUT
  upsample IN --factor F [--detail-cmd PROG] --w W -o OUT
  integrate IN [--solver {frankot|poisson}] -o-depth Z [-o-obj MESH --scale S]
  evaluate A B [--metric {mae|ssim|rotsim|all}] [--w W]

common options:
  --w W            kernel half-width (default 5)
  --kernel KIND    gauss or avg (default gauss)
  --sigma S        gaussian sigma (default w/2)
  --report FILE    also write the report as JSON

defaults: w=5 kernel=gauss sigma=w/2 window=11 tol=0.1 seed=0 factor=4
file formats: .nrm (float32, lossless) and .png (16-bit RGB)
exit codes: 0 ok, 1 usage error, 2 data error, 3 numeric failure
)";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Args {
public:
    Args(int argc, char** argv, int first, std::set<std::string> value_flags,
         std::set<std::string> bool_flags)
        : value_flags_(std::move(value_flags)), bool_flags_(std::move(bool_flags)) {
        for (int i = first; i < argc; ++i) {
            const std::string a = argv[i];
            if (value_flags_.count(a)) {
                if (i + 1 >= argc) throw UsageError("missing value for " + a);
                values_[a] = argv[++i];
            } else if (bool_flags_.count(a)) {
                present_.insert(a);
            } else if (!a.empty() && a[0] == '-' && a != "-") {
                throw UsageError("unknown option " + a);
            } else {
                positional_.push_back(a);
            }
        }
    }

    const std::vector<std::string>& positional() const { return positional_; }

    std::string require(const std::string& flag) const {
        auto it = values_.find(flag);
        if (it == values_.end()) throw UsageError("missing required option " + flag);
        return it->second;
    }

    std::optional<std::string> get(const std::string& flag) const {
        auto it = values_.find(flag);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    bool has(const std::string& flag) const { return present_.count(flag) > 0; }

    int get_int(const std::string& flag, int fallback) const {
        auto v = get(flag);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const int n = std::stoi(*v, &used);
            if (used != v->size()) throw std::invalid_argument(*v);
            return n;
        } catch (const std::exception&) {
            throw UsageError("bad integer for " + flag + ": " + *v);
        }
    }

    double get_double(const std::string& flag, double fallback) const {
        auto v = get(flag);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const double d = std::stod(*v, &used);
            if (used != v->size()) throw std::invalid_argument(*v);
            return d;
        } catch (const std::exception&) {
            throw UsageError("bad number for " + flag + ": " + *v);
        }
    }

private:
    std::set<std::string> value_flags_, bool_flags_;
    std::map<std::string, std::string> values_;
    std::set<std::string> present_;
    std::vector<std::string> positional_;
};

NormalMap load_input(const std::string& path) {
    normcraft::LoadStats stats;
    NormalMap map = normcraft::load_normal_map(path, &stats);
    if (stats.quantization_warnings > 0)
        std::cerr << "warning: " << path << ": " << stats.quantization_warnings
                  << " pixels were off unit norm by more than 1e-3 (renormalized)\n";
    return map;
}

Kernel kernel_from(const Args& args) {
    const int w = args.get_int("--w", 5);
    const std::string kind = args.get("--kernel").value_or("gauss");
    if (kind == "avg") return Kernel::average(w);
    if (kind != "gauss") throw UsageError("unknown kernel kind: " + kind);
    return Kernel::gaussian(w, args.get_double("--sigma", 0.0));
}

// Every report carries the parameter set that produced it.
struct Report {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) {
        entries.emplace_back(key, value);
    }
    void add(const std::string& key, double value) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", value);
        entries.emplace_back(key, buf);
    }
    void add(const std::string& key, long value) {
        entries.emplace_back(key, std::to_string(value));
    }
    void add_kernel(const Kernel& k) {
        add("w", long(k.half_width()));
        add("kernel", k.describe());
        if (k.kind() == normcraft::KernelKind::kGaussian) add("sigma", k.sigma());
    }

    void print() const {
        for (const auto& [k, v] : entries) std::cout << k << "=" << v << "\n";
    }
    void write_json(const std::string& path) const {
        nlohmann::json j;
        for (const auto& [k, v] : entries) j[k] = v;
        std::ofstream out(path);
        if (!out) throw normcraft::DataError("cannot write report " + path);
        out << j.dump(2) << "\n";
    }
    void finish(const Args& args) const {
        print();
        if (auto path = args.get("--report")) write_json(*path);
    }
};

int cmd_decompose(const Args& args) {
    if (args.positional().size() != 1) throw UsageError("decompose needs one input file");
    const Kernel k = kernel_from(args);
    const NormalMap input = load_input(args.positional()[0]);
    const auto dec = normcraft::decompose(input, k);
    normcraft::save_normal_map(dec.shape, args.require("-o-shape"));
    normcraft::save_normal_map(dec.detail, args.require("-o-detail"));

    Report rep;
    rep.add("command", std::string("decompose"));
    rep.add_kernel(k);
    rep.add("width", long(input.width()));
    rep.add("height", long(input.height()));
    rep.add("valid_pixels", input.valid_count());
    rep.finish(args);
    return 0;
}

int cmd_transfer(const Args& args) {
    const Kernel k = kernel_from(args);
    normcraft::TransferRequest req;
    req.source_detail = load_input(args.require("--detail"));
    req.target_shape = load_input(args.require("--shape"));
    if (args.has("--tile")) req.tiling = normcraft::Tiling::kWrap;
    const bool local = args.get("--region").has_value();
    if (local) {
        const NormalMap region_map = normcraft::load_normal_map(args.require("--region"));
        if (!region_map.same_dims(req.target_shape))
            throw normcraft::DimensionMismatch("region mask dimensions differ from target");
        req.region = region_map.mask();
    }
    const auto res = local ? normcraft::local_transfer(req, k) : normcraft::transfer(req, k);
    normcraft::save_normal_map(res.output, args.require("-o"));

    Report rep;
    rep.add("command", std::string("transfer"));
    rep.add_kernel(k);
    rep.add("tiling", std::string(req.tiling == normcraft::Tiling::kWrap ? "wrap" : "none"));
    rep.add("local", std::string(local ? "true" : "false"));
    rep.add("shape_mae_deg", res.shape_mae_deg);
    rep.add("detail_mae_deg", res.detail_mae_deg);
    rep.add("detail_ssim", res.detail_ssim);
    rep.finish(args);
    return 0;
}

int cmd_synthesize(const Args& args) {
    normcraft::SynthesisParams p;
    p.out_width = args.get_int("--width", 0);
    p.out_height = args.get_int("--height", 0);
    p.window = args.get_int("--window", 11);
    p.err_tolerance = args.get_double("--tol", 0.1);
    p.seed = static_cast<std::uint64_t>(args.get_int("--seed", 0));
    normcraft::Swatch swatch{load_input(args.require("--swatch")),
                             args.get_int("--w", 5)};
    const NormalMap out = normcraft::synthesize_detail(swatch, p);
    normcraft::save_normal_map(out, args.require("-o"));

    Report rep;
    rep.add("command", std::string("synthesize"));
    rep.add("window", long(p.window));
    rep.add("tol", p.err_tolerance);
    rep.add("seed", long(p.seed));
    rep.add("width", long(out.width()));
    rep.add("height", long(out.height()));
    rep.finish(args);
    return 0;
}

int cmd_upsample(const Args& args) {
    if (args.positional().size() != 1) throw UsageError("upsample needs one input file");
    const Kernel k = kernel_from(args);
    normcraft::UpsampleSpec spec;
    spec.factor = args.get_int("--factor", 4);
    if (auto cmd = args.get("--detail-cmd")) {
        spec.detail_method = normcraft::DetailUpsampler::kExternal;
        spec.external_cmd = *cmd;
    }
    spec.timeout_sec = args.get_double("--timeout", 300.0);
    const NormalMap input = load_input(args.positional()[0]);
    const NormalMap out = normcraft::upsample(input, spec, k);
    normcraft::save_normal_map(out, args.require("-o"));

    Report rep;
    rep.add("command", std::string("upsample"));
    rep.add_kernel(k);
    rep.add("factor", long(spec.factor));
    rep.add("detail_method", std::string(spec.detail_method == normcraft::DetailUpsampler::kBicubic
                                             ? "bicubic"
                                             : spec.external_cmd));
    rep.add("width", long(out.width()));
    rep.add("height", long(out.height()));
    rep.finish(args);
    return 0;
}

int cmd_integrate(const Args& args) {
    if (args.positional().size() != 1) throw UsageError("integrate needs one input file");
    const std::string solver = args.get("--solver").value_or("frankot");
    const NormalMap input = load_input(args.positional()[0]);
    const auto grads = normcraft::normals_to_gradients(input);

    normcraft::DepthMap depth;
    Report rep;
    rep.add("command", std::string("integrate"));
    rep.add("solver", solver);
    if (solver == "frankot") {
        if (input.valid_count() != long(input.size()))
            throw normcraft::MaskNotFull(
                "frankot needs a full-frame mask; use --solver poisson");
        depth = normcraft::integrate_frankot(grads);
    } else if (solver == "poisson") {
        auto result = normcraft::integrate_poisson(grads, input.mask());
        rep.add("residual", result.residual);
        rep.add("iterations", long(result.iterations));
        rep.add("converged", std::string(result.converged ? "true" : "false"));
        depth = std::move(result.depth);
        if (!result.converged) {
            normcraft::save_depth(depth, args.require("-o-depth"));
            rep.finish(args);
            throw normcraft::ConvergenceFailure("poisson solver did not converge",
                                                result.residual, result.iterations);
        }
    } else {
        throw UsageError("unknown solver: " + solver);
    }
    if (grads.clamped_count > 0)
        std::cerr << "warning: " << grads.clamped_count
                  << " grazing normals clamped during gradient conversion\n";

    normcraft::save_depth(depth, args.require("-o-depth"));
    if (auto obj = args.get("-o-obj")) {
        const double scale = args.get_double("--scale", 1.0);
        const auto mesh = normcraft::depth_to_mesh(depth, scale);
        std::ofstream os(*obj);
        if (!os) throw normcraft::DataError("cannot write " + *obj);
        normcraft::write_obj(mesh, os);
        rep.add("vertices", long(mesh.vertices.size() / 3));
        rep.add("faces", long(mesh.faces.size() / 3));
    }
    rep.add("clamped_gradients", long(grads.clamped_count));
    rep.finish(args);
    return 0;
}

int cmd_evaluate(const Args& args) {
    if (args.positional().size() != 2) throw UsageError("evaluate needs two input files");
    const std::string metric = args.get("--metric").value_or("all");
    const int w = args.get_int("--w", 5);
    const NormalMap a = load_input(args.positional()[0]);
    const NormalMap b = load_input(args.positional()[1]);

    Report rep;
    if (metric == "mae") {
        rep.add("mae_deg", normcraft::mae(a, b));
    } else if (metric == "ssim") {
        const auto r = normcraft::ssim(a, b);
        rep.add("ssim", r.ssim);
        rep.add("ssim_x", r.per_channel_ssim[0]);
        rep.add("ssim_y", r.per_channel_ssim[1]);
        rep.add("ssim_z", r.per_channel_ssim[2]);
        rep.add("n_pixels", r.n_pixels);
    } else if (metric == "rotsim") {
        const auto r = normcraft::rotation_similarity(a, w);
        rep.add("theta_bar_deg", r.mean.theta_bar_deg);
        rep.add("l1", r.mean.l1);
        rep.add("l2", r.mean.l2);
        rep.add("linf", r.mean.linf);
        rep.add("w", long(w));
    } else if (metric == "all") {
        const auto r = normcraft::ssim(a, b);
        rep.add("mae_deg", r.mae_deg);
        rep.add("ssim", r.ssim);
        rep.add("ssim_x", r.per_channel_ssim[0]);
        rep.add("ssim_y", r.per_channel_ssim[1]);
        rep.add("ssim_z", r.per_channel_ssim[2]);
        rep.add("n_pixels", r.n_pixels);
    } else {
        throw UsageError("unknown metric: " + metric);
    }
    rep.finish(args);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    normcraft::apply_thread_env();
    if (argc < 2) {
        std::cerr << kUsage;
        return 1;
    }
    const std::string cmd = argv[1];
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        std::cout << kUsage;
        return 0;
    }

    try {
        const std::set<std::string> common = {"--w", "--kernel", "--sigma", "--report"};
        if (cmd == "decompose") {
            std::set<std::string> vals = common;
            vals.insert({"-o-shape", "-o-detail"});
            return cmd_decompose(Args(argc, argv, 2, vals, {}));
        }
        if (cmd == "transfer") {
            std::set<std::string> vals = common;
            vals.insert({"--detail", "--shape", "--region", "-o"});
            return cmd_transfer(Args(argc, argv, 2, vals, {"--tile"}));
        }
        if (cmd == "synthesize") {
            std::set<std::string> vals = common;
            vals.insert({"--swatch", "--width", "--height", "--window", "--tol", "--seed", "-o"});
            return cmd_synthesize(Args(argc, argv, 2, vals, {}));
        }
        if (cmd == "upsample") {
            std::set<std::string> vals = common;
            vals.insert({"--factor", "--detail-cmd", "--timeout", "-o"});
            return cmd_upsample(Args(argc, argv, 2, vals, {}));
        }
        if (cmd == "integrate") {
            std::set<std::string> vals = common;
            vals.insert({"--solver", "-o-depth", "-o-obj", "--scale"});
            return cmd_integrate(Args(argc, argv, 2, vals, {}));
        }
        if (cmd == "evaluate") {
            std::set<std::string> vals = common;
            vals.insert({"--metric"});
            return cmd_evaluate(Args(argc, argv, 2, vals, {}));
        }
        std::cerr << "unknown subcommand: " << cmd << "\n" << kUsage;
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const normcraft::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const normcraft::ComputeError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
