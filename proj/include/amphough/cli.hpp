#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "amphough/accumulator_io.hpp"
#include "amphough/config.hpp"
#include "amphough/correlation.hpp"
#include "amphough/errors.hpp"
#include "amphough/filters.hpp"
#include "amphough/grid.hpp"
#include "amphough/group.hpp"
#include "amphough/image_io.hpp"
#include "amphough/radon.hpp"
#include "amphough/synth.hpp"
#include "amphough/wave.hpp"

namespace amphough::cli {

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config's seed key
    std::optional<int> threads;         // overrides the config's threads key
};

namespace detail {

inline std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline std::uint64_t resolve_seed(const Options& opt, const KvReader& kv) {
    if (opt.seed) return *opt.seed;
    return static_cast<std::uint64_t>(kv.get_int("seed", 0));
}

inline int resolve_threads(const Options& opt, const KvReader& kv) {
    if (opt.threads) return *opt.threads;
    return static_cast<int>(kv.get_int("threads", 0));
}

inline ShapeSpec parse_shape(const ConfigSection& section) {
    KvReader kv(section.entries, "[shape] block at line " + std::to_string(section.line));
    ShapeSpec s;
    const std::string kind = kv.get_string("kind");
    s.value = kv.get_double("value", 1.0);
    if (kind == "point") {
        s.kind = ShapeSpec::Kind::point;
        s.x = kv.get_double("x");
        s.y = kv.get_double("y");
    } else if (kind == "line") {
        s.kind = ShapeSpec::Kind::line;
        s.r = kv.get_double("r");
        s.phi = kv.get_double("phi");
    } else if (kind == "circle") {
        s.kind = ShapeSpec::Kind::circle;
        s.x = kv.get_double("cx");
        s.y = kv.get_double("cy");
        s.radius = kv.get_double("radius");
    } else if (kind == "square") {
        s.kind = ShapeSpec::Kind::square;
        s.pose = GroupElement(kv.get_double("x0"), kv.get_double("y0"), kv.get_double("s"),
                              kv.get_double("theta"));
    } else {
        throw BadScene("unknown shape kind '" + kind + "'");
    }
    return s;
}

inline ScalarGrid load_image(const KvReader& kv, const std::string& path_key) {
    ScalarGrid g = read_pgm(kv.get_string(path_key));
    g.origin_x = kv.get_double("image_origin_x", 0.0);
    g.origin_y = kv.get_double("image_origin_y", 0.0);
    g.spacing = kv.get_double("image_spacing", 1.0);
    if (!(g.spacing > 0.0)) throw ParseError("image_spacing must be positive");
    return g;
}

inline ParamLattice parse_lattice(const KvReader& kv) {
    ParamLattice lat;
    auto axis = [&](const std::string& name) {
        AxisSpec a;
        a.min = kv.get_double(name + "_min");
        a.max = kv.get_double(name + "_max", a.min);
        a.count = static_cast<int>(kv.get_int(name + "_count", 1));
        return a;
    };
    lat.x0 = axis("x0");
    lat.y0 = axis("y0");
    lat.s = axis("s");
    lat.theta = axis("theta");
    lat.s_geometric = kv.get_bool("s_geometric", true);
    lat.theta_wraps = kv.get_bool("theta_wraps", true);
    validate_lattice(lat);
    return lat;
}

inline FilterSpec parse_filter_spec(const KvReader& kv) {
    if (kv.has("preset")) {
        const std::string preset = kv.get_string("preset");
        if (preset == "a00")
            return {FeatureComponent::value, FeatureComponent::value, CombineMode::scalar_product, {}};
        if (preset == "a11") return preset_a11();
        if (preset == "a22") return preset_a22();
        if (preset == "a33") return preset_a33();
        throw ParseError("unknown filter preset '" + preset + "'");
    }
    auto component = [&](const std::string& key) {
        const std::string v = kv.get_string(key);
        if (v == "value") return FeatureComponent::value;
        if (v == "grad_mag") return FeatureComponent::grad_mag;
        if (v == "grad_vec") return FeatureComponent::grad_vec;
        if (v == "laplacian") return FeatureComponent::laplacian;
        throw ParseError("unknown feature component '" + v + "'");
    };
    FilterSpec spec;
    spec.template_component = component("template_component");
    spec.data_component = component("data_component");
    const std::string combine = kv.get_string("combine", "scalar_product");
    if (combine == "scalar_product")
        spec.combine = CombineMode::scalar_product;
    else if (combine == "vector_dot")
        spec.combine = CombineMode::vector_dot;
    else if (combine == "thresholded")
        spec.combine = CombineMode::thresholded;
    else
        throw ParseError("unknown combine mode '" + combine + "'");
    if (kv.has("threshold")) spec.threshold = kv.get_double("threshold");
    return spec;
}

// x0/y0 slice of the probability map at the argmax (s, theta) bins,
// rendered as a grid for heatmap export.
inline ScalarGrid probability_slice_grid(const ProbabilityMap& map, const std::array<int, 4>& at) {
    const ParamLattice& lat = map.lattice;
    ScalarGrid g(lat.x0.count, lat.y0.count, lat.x0.min, lat.y0.min, 1.0);
    for (int iy = 0; iy < lat.y0.count; ++iy)
        for (int ix = 0; ix < lat.x0.count; ++ix)
            g.at(ix, iy) = map.values[lat.index(ix, iy, at[2], at[3])];
    return g;
}

} // namespace detail

inline int cmd_synth(const Options& opt, const Config& cfg, std::ostream& out) {
    KvReader kv(cfg.globals, "synth config");
    SceneSpec scene;
    scene.width = static_cast<int>(kv.get_int("width"));
    scene.height = static_cast<int>(kv.get_int("height"));
    scene.origin_x = kv.get_double("origin_x", 0.0);
    scene.origin_y = kv.get_double("origin_y", 0.0);
    scene.spacing = kv.get_double("spacing", 1.0);
    scene.noise_sigma = kv.get_double("noise_sigma", 0.0);
    for (const ConfigSection& sec : cfg.sections) {
        if (sec.name != "shape")
            throw ParseError("synth config: unexpected section [" + sec.name + "]");
        scene.shapes.push_back(detail::parse_shape(sec));
    }
    const std::uint64_t seed = detail::resolve_seed(opt, kv);
    const ScalarGrid g = synth_scene(scene, seed);
    const std::string name = kv.get_string("output", "scene.pgm");
    const std::string path = detail::join(opt.out_dir, name);
    write_pgm(path, g);
    write_scene_truth(path + ".truth.txt", scene);
    out << "wrote " << path << "\n";
    return 0;
}

inline int cmd_radon(const Options& opt, const Config& cfg, std::ostream& out) {
    KvReader kv(cfg.globals, "radon config");
    const ScalarGrid f = detail::load_image(kv, "image");
    const Sinogram s =
        radon_transform(f, kv.get_double("r_min"), kv.get_double("r_max"),
                        static_cast<int>(kv.get_int("n_r")), static_cast<int>(kv.get_int("n_phi")));
    const std::string prefix = kv.get_string("output_prefix", "sinogram");
    const std::string csv = detail::join(opt.out_dir, prefix + ".csv");
    write_sinogram_csv(csv, s);
    write_pgm_heatmap(detail::join(opt.out_dir, prefix + ".pgm"), sinogram_to_grid(s));
    out << "wrote " << csv << "\n";
    return 0;
}

inline int cmd_correlate(const Options& opt, const Config& cfg, std::ostream& out) {
    KvReader kv(cfg.globals, "correlate config");
    const ScalarGrid f = detail::load_image(kv, "image");
    ScalarGrid t = read_pgm(kv.get_string("template"));
    t.spacing = f.spacing;
    const std::string method = kv.get_string("method", "fft");
    CorrelationMap m;
    if (method == "fft")
        m = cross_correlate_fft(f, t);
    else if (method == "direct")
        m = cross_correlate_direct(f, t);
    else
        throw ParseError("unknown correlation method '" + method + "'");
    if (kv.get_bool("normalized", false)) m = normalize_correlation(m, f, t);
    const std::string prefix = kv.get_string("output_prefix", "correlation");
    write_grid_csv(detail::join(opt.out_dir, prefix + ".csv"), m.grid);
    write_pgm_heatmap(detail::join(opt.out_dir, prefix + ".pgm"), m.grid);
    out << "wrote " << detail::join(opt.out_dir, prefix + ".csv") << "\n";
    return 0;
}

inline int cmd_detect(const Options& opt, const Config& cfg, std::ostream& out) {
    KvReader kv(cfg.globals, "detect config");
    const ScalarGrid f = detail::load_image(kv, "image");
    const ParamLattice lattice = detail::parse_lattice(kv);
    const int threads = detail::resolve_threads(opt, kv);
    const std::string method = kv.get_string("method", "filters");

    AmplitudeAccumulator acc;
    if (method == "curve") {
        if (!cfg.sections.empty())
            throw ParseError("detect config: [" + cfg.sections.front().name +
                             "] blocks are not used by the curve method");
        const std::string curve_kind = kv.get_string("curve");
        const double step = kv.get_double("curve_step", f.spacing / 2.0);
        TemplateCurve curve;
        if (curve_kind == "circle")
            curve = make_circle_curve(kv.get_double("curve_radius"), step);
        else if (curve_kind == "line")
            curve = make_line_curve(kv.get_double("curve_length"), step);
        else
            throw ParseError("unknown curve kind '" + curve_kind + "'");
        acc = extended_radon(f, curve, lattice, threads);
    } else if (method == "filters") {
        ScalarGrid t;
        if (kv.has("template")) {
            t = read_pgm(kv.get_string("template"));
            t.spacing = kv.get_double("template_spacing", 1.0);
            if (kv.get_bool("template_centered", true)) {
                t.origin_x = -0.5 * (t.width - 1) * t.spacing;
                t.origin_y = -0.5 * (t.height - 1) * t.spacing;
            }
        } else {
            const std::string kind = kv.get_string("template_kind");
            if (kind != "square") throw ParseError("unknown template_kind '" + kind + "'");
            t = make_square_template(static_cast<int>(kv.get_int("template_size", 33)),
                                     kv.get_double("template_extent", 2.0));
        }
        const FeatureStack t_stack = feature_expand(t);
        const FeatureStack f_stack = feature_expand(f);
        if (cfg.sections.empty()) throw ParseError("detect config: at least one [filter] block required");
        std::vector<AmplitudeAccumulator> parts;
        CoefficientSet coeffs;
        for (const ConfigSection& sec : cfg.sections) {
            if (sec.name != "filter")
                throw ParseError("detect config: unexpected section [" + sec.name + "]");
            KvReader fkv(sec.entries, "[filter] block at line " + std::to_string(sec.line));
            parts.push_back(accumulate(detail::parse_filter_spec(fkv), t_stack, f_stack, lattice, threads));
            coeffs.terms.push_back(
                {parts.size() - 1, {fkv.get_double("c_re", 1.0), fkv.get_double("c_im", 0.0)}});
        }
        acc = superpose_accumulators(coeffs, parts);
    } else {
        throw ParseError("unknown detect method '" + method + "'");
    }

    const ProbabilityMap map = probability_map(acc);
    const double min_fraction = kv.get_double("min_fraction", 0.5);
    const std::array<int, 4> radii{static_cast<int>(kv.get_int("radius_x0", 1)),
                                   static_cast<int>(kv.get_int("radius_y0", 1)),
                                   static_cast<int>(kv.get_int("radius_s", 1)),
                                   static_cast<int>(kv.get_int("radius_theta", 1))};
    const std::vector<Detection> dets = detect_peaks(map, min_fraction, radii);

    const std::string prefix = kv.get_string("output_prefix", "detect");
    write_accumulator(detail::join(opt.out_dir, prefix + ".amph"), acc);
    write_detection_report(detail::join(opt.out_dir, prefix + "_detections.txt"), dets);
    std::array<int, 4> at{0, 0, 0, 0};
    if (!dets.empty()) at = dets.front().bin;
    write_pgm_heatmap(detail::join(opt.out_dir, prefix + "_prob.pgm"),
                      detail::probability_slice_grid(map, at));
    write_accumulator_slice_csv(detail::join(opt.out_dir, prefix + "_slice.csv"), acc, 0, 1, at);
    out << "wrote " << detail::join(opt.out_dir, prefix + "_detections.txt") << " (" << dets.size()
        << " detections)\n";
    return 0;
}

inline int cmd_interfere(const Options&, const Config& cfg, std::ostream& out) {
    KvReader kv(cfg.globals, "interfere config");
    const double a1 = kv.get_double("a1");
    const double phi1 = kv.get_double("phi1");
    const double a2 = kv.get_double("a2");
    const double phi2 = kv.get_double("phi2");
    const double i12 = two_wave_intensity(a1, phi1, a2, phi2);
    out << "I1 = " << format_g17(a1 * a1) << "\n";
    out << "I2 = " << format_g17(a2 * a2) << "\n";
    out << "I12 = " << format_g17(i12) << "\n";
    return 0;
}

inline void print_usage(std::ostream& err) {
    err << "usage: amphough <synth|radon|correlate|detect|interfere> --config <path>"
           " [--out <dir>] [--seed <u64>] [--threads <n>]\n";
}

/// Parses arguments, dispatches the subcommand and maps library errors to
/// a one-line diagnostic with a nonzero exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    Options opt;
    if (args.empty()) {
        print_usage(err);
        return 2;
    }
    opt.command = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto next = [&](const char* name) -> const std::string& {
            if (i + 1 >= args.size()) {
                throw Error(std::string(name) + " requires an argument");
            }
            return args[++i];
        };
        try {
            if (a == "--config")
                opt.config_path = next("--config");
            else if (a == "--out")
                opt.out_dir = next("--out");
            else if (a == "--seed")
                opt.seed = std::stoull(next("--seed"));
            else if (a == "--threads")
                opt.threads = std::stoi(next("--threads"));
            else {
                err << "amphough: unknown argument '" << a << "'\n";
                print_usage(err);
                return 2;
            }
        } catch (const std::exception& e) {
            err << "amphough: " << e.what() << "\n";
            return 2;
        }
    }
    if (opt.config_path.empty()) {
        err << "amphough: --config is required\n";
        print_usage(err);
        return 2;
    }
    const bool known = opt.command == "synth" || opt.command == "radon" ||
                       opt.command == "correlate" || opt.command == "detect" ||
                       opt.command == "interfere";
    if (!known) {
        err << "amphough: unknown command '" << opt.command << "'\n";
        print_usage(err);
        return 2;
    }
    try {
        std::filesystem::create_directories(opt.out_dir);
        const Config cfg = load_config(opt.config_path);
        if (opt.command == "synth") return cmd_synth(opt, cfg, out);
        if (opt.command == "radon") return cmd_radon(opt, cfg, out);
        if (opt.command == "correlate") return cmd_correlate(opt, cfg, out);
        if (opt.command == "detect") return cmd_detect(opt, cfg, out);
        return cmd_interfere(opt, cfg, out);
    } catch (const Error& e) {
        err << "amphough: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "amphough: " << e.what() << "\n";
        return 1;
    }
}

} // namespace amphough::cli
