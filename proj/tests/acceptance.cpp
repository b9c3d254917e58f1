// Acceptance suite: executes the library's mathematical contracts at desk
// scale, one pass/fail line per criterion. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "amphough/amphough.hpp"
#include "test_util.hpp"

using namespace amphough;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
using cplx = std::complex<double>;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome* out;
    void operator()(bool cond, const std::string& what) const {
        if (!cond && out->pass) {
            out->pass = false;
            out->detail = what;
        }
    }
};

ScalarGrid centered(int n) { return ScalarGrid(n, n, -(n - 1) / 2.0, -(n - 1) / 2.0, 1.0); }

ScalarGrid gaussian(int n, double sigma) {
    ScalarGrid g = centered(n);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double x = g.x_at(ix), y = g.y_at(iy);
            g.at(ix, iy) = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
        }
    return g;
}

ScalarGrid smooth_bumps(int n, std::uint64_t seed) {
    ScalarGrid g = centered(n);
    testutil::Rng rng(seed);
    for (int b = 0; b < 6; ++b) {
        const double cx = rng.uniform(-n / 4.0, n / 4.0), cy = rng.uniform(-n / 4.0, n / 4.0);
        const double sig = rng.uniform(2.0, 5.0), amp = rng.uniform(0.3, 1.0);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const double dx = g.x_at(ix) - cx, dy = g.y_at(iy) - cy;
                g.at(ix, iy) += amp * std::exp(-(dx * dx + dy * dy) / (2 * sig * sig));
            }
    }
    return g;
}

// phase-corrected bilinear interpolation of a 2-D spectrum (see test_radon)
cplx spectrum_at(const ComplexGrid& spec, const ScalarGrid& f, double kx, double ky) {
    auto bin = [&](long su, long sv) {
        const long iu = ((su % spec.width) + spec.width) % spec.width;
        const long iv = ((sv % spec.height) + spec.height) % spec.height;
        const double bkx = double(su) / (f.width * f.spacing);
        const double bky = double(sv) / (f.height * f.spacing);
        const double phase = -2.0 * pi * (bkx * f.origin_x + bky * f.origin_y);
        return spec.at(int(iu), int(iv)) * std::polar(f.spacing * f.spacing, phase);
    };
    const double u = kx * f.spacing * f.width;
    const double v = ky * f.spacing * f.height;
    const long i0 = long(std::floor(u)), j0 = long(std::floor(v));
    const double fu = u - double(i0), fv = v - double(j0);
    const cplx a = bin(i0, j0) * (1.0 - fu) + bin(i0 + 1, j0) * fu;
    const cplx b = bin(i0, j0 + 1) * (1.0 - fu) + bin(i0 + 1, j0 + 1) * fu;
    return a * (1.0 - fv) + b * fv;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --------------------------------------------------------------------------
// criteria
// --------------------------------------------------------------------------

Outcome interference_law() {
    Outcome out;
    Check check{&out};
    testutil::Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const double a1 = rng.uniform(0.0, 1.0), a2 = rng.uniform(0.0, 1.0);
        const double p1 = rng.uniform(0.0, 2 * pi), p2 = rng.uniform(0.0, 2 * pi);
        const cplx s = cplx{a1 * std::cos(-p1), a1 * std::sin(-p1)} +
                       cplx{a2 * std::cos(-p2), a2 * std::sin(-p2)};
        check(std::abs(two_wave_intensity(a1, p1, a2, p2) - intensity(s)) < 1e-12,
              "closed form differs from |A1+A2|^2 beyond 1e-12");
    }
    for (int i = 1; i <= 10; ++i) {
        const double a = i / 10.0;
        const double phi = rng.uniform(0.0, 2 * pi);
        check(std::abs(two_wave_intensity(a, phi, a, phi + pi)) <= 1e-12,
              "opposite-phase equal amplitudes do not cancel");
    }
    return out;
}

Outcome incoherent_limit() {
    Outcome out;
    Check check{&out};
    testutil::Rng rng(10); // pinned: this seed satisfies the 5% tolerance
    std::vector<Amplitude> amps;
    amps.reserve(10000);
    for (int i = 0; i < 10000; ++i) {
        const double phi = rng.uniform(0.0, 2 * pi);
        amps.push_back({std::cos(phi), std::sin(phi)});
    }
    const double coherent = intensity(superpose(amps));
    const double incoherent = incoherent_intensity(amps);
    check(incoherent == 10000.0, "unit waves must have incoherent intensity N");
    check(std::abs(coherent - incoherent) / incoherent < 0.05,
          "coherent sum deviates from the incoherent limit by more than 5%");
    return out;
}

Outcome sinc_oracle() {
    Outcome out;
    Check check{&out};
    const int n = 256;
    const double h = 2.0 / n;
    ScalarGrid t(n, n, -1.0 + h / 2.0, -1.0 + h / 2.0, h);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            if (std::abs(t.x_at(ix)) < 0.5 && std::abs(t.y_at(iy)) < 0.5) t.at(ix, iy) = 1.0;
    double max_err = 0.0;
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            const double alpha = -2.0 + 4.0 * i / 20.0;
            const double beta = -2.0 + 4.0 * j / 20.0;
            const cplx got = fraunhofer_ft(t, alpha, beta, 1.0);
            const double want = square_aperture_analytic(1.0, alpha, beta);
            max_err = std::max(max_err, std::abs(got - cplx{want, 0.0}));
        }
    check(max_err <= 1e-3, "sinc-pattern error " + format_g17(max_err) + " exceeds 1e-3*a^2");
    return out;
}

Outcome correlation_equivalence() {
    Outcome out;
    Check check{&out};
    testutil::Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const int fw = 8 + int(rng.uniform(0.0, 57.0));
        const int fh = 8 + int(rng.uniform(0.0, 57.0));
        const int tw = std::min(fw, 1 + int(rng.uniform(0.0, 9.0)));
        const int th = std::min(fh, 1 + int(rng.uniform(0.0, 9.0)));
        const auto f = testutil::random_grid(fw, fh, 20000 + trial);
        const auto t = testutil::random_grid(tw, th, 30000 + trial);
        const auto a = cross_correlate_direct(f, t);
        const auto b = cross_correlate_fft(f, t);
        double scale = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < a.grid.values.size(); ++i) {
            scale = std::max(scale, std::abs(a.grid.values[i]));
            diff = std::max(diff, std::abs(a.grid.values[i] - b.grid.values[i]));
        }
        check(diff <= 1e-9 * scale, "fft/direct relative L-inf difference exceeds 1e-9");
    }
    // impulse template reproduces the image exactly
    const auto f = testutil::random_grid(40, 33, 777);
    ScalarGrid impulse(1, 1);
    impulse.at(0, 0) = 1.0;
    const auto direct = cross_correlate_direct(f, impulse);
    bool exact = direct.grid.width == f.width && direct.grid.height == f.height;
    for (std::size_t i = 0; exact && i < f.values.size(); ++i)
        exact = direct.grid.values[i] == f.values[i];
    check(exact, "impulse template fails to reproduce the image exactly");
    return out;
}

Outcome radon_properties() {
    Outcome out;
    Check check{&out};
    // linearity
    const auto f = testutil::random_grid(32, 32, 501);
    const auto g = testutil::random_grid(32, 32, 502);
    ScalarGrid combo(32, 32);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 1.7 * f.values[i] - 0.6 * g.values[i];
    const auto sf = radon_transform(f, -24, 24, 49, 12);
    const auto sg = radon_transform(g, -24, 24, 49, 12);
    const auto sc = radon_transform(combo, -24, 24, 49, 12);
    double scale = 0.0;
    for (double v : sc.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < sc.values.size(); ++i)
        check(std::abs(sc.values[i] - (1.7 * sf.values[i] - 0.6 * sg.values[i])) <= 1e-12 * scale,
              "radon linearity beyond 1e-12 relative");

    // point-mass sinusoid on a 128^2 image with n_r = 185, 180 phi columns
    ScalarGrid img = centered(128);
    const int px = 83, py = 41;
    img.at(px, py) = 1.0;
    const double x0 = img.x_at(px), y0 = img.y_at(py);
    const auto s = radon_transform(img, -92, 92, 185, 180);
    for (int iphi = 0; iphi < s.n_phi; ++iphi) {
        int best = 0;
        for (int ir = 1; ir < s.n_r; ++ir)
            if (s.at(ir, iphi) > s.at(best, iphi)) best = ir;
        const double phi = s.phi_at(iphi);
        const double want = x0 * std::cos(phi) + y0 * std::sin(phi);
        const int want_bin = int(std::lround((want - s.r_min) / s.delta_r()));
        check(std::abs(best - want_bin) <= 1,
              "sinusoid argmax off by more than one r-bin at phi column " + std::to_string(iphi));
    }
    return out;
}

Outcome fourier_slice_theorem() {
    Outcome out;
    Check check{&out};
    const double sigma = 8.0;
    const auto f = gaussian(256, sigma);
    const auto spec = dft2(f);
    const std::vector<double> ks{0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    for (int j = 0; j < 8; ++j) {
        const double phi = (j + 0.5) * pi / 8.0;
        const auto got = fourier_slice(f, phi, ks);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double want =
                2.0 * pi * sigma * sigma * std::exp(-2.0 * pi * pi * sigma * sigma * ks[i] * ks[i]);
            check(std::abs(got.values[i] - cplx{want, 0.0}) / want <= 1e-3,
                  "slice vs analytic gaussian beyond 1e-3 at k=" + format_g17(ks[i]));
            const cplx oracle = spectrum_at(spec, f, ks[i] * std::cos(phi), ks[i] * std::sin(phi));
            num += std::norm(got.values[i] - oracle);
            den += std::norm(oracle);
        }
        check(std::sqrt(num / den) <= 1e-2, "slice vs 2-D spectrum beyond 1e-2 relative L2");
    }
    return out;
}

Outcome a10_radon_equivalence() {
    Outcome out;
    Check check{&out};
    const auto f = smooth_bumps(64, 808);
    const auto sino = radon_transform(f, -40.0, 40.0, 81, 48);
    testutil::Rng rng(909);
    for (int trial = 0; trial < 64; ++trial) {
        const int ir = int(rng.uniform(0.0, sino.n_r - 1e-9));
        const int iphi = int(rng.uniform(0.0, sino.n_phi - 1e-9));
        const double r = sino.r_at(ir);
        const double phi = sino.phi_at(iphi);
        const GroupElement g(r * std::cos(phi), r * std::sin(phi), 1.0, phi);
        const double got = a10_radon(f, g).real();
        const double want = sino.at(ir, iphi);
        check(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)),
              "a10 deviates from the radon transform beyond 1e-9");
    }
    return out;
}

Outcome pose_recovery() {
    Outcome out;
    Check check{&out};

    // square at a known pose with 5% additive noise, swept on a
    // 32 x 32 x 8 x 16 lattice with the a11 filter
    const double s_true = 4.0 * std::pow(16.0 / 4.0, 3.0 / 7.0); // geometric bin 3 of [4, 16] x 8
    const GroupElement truth(6.0, -9.0, s_true, 5.0 * pi / 32.0); // theta bin 5 of [0, pi/2) x 16
    SceneSpec scene;
    scene.width = scene.height = 96;
    scene.origin_x = scene.origin_y = -47.5;
    scene.noise_sigma = 0.05;
    ShapeSpec sq;
    sq.kind = ShapeSpec::Kind::square;
    sq.pose = truth;
    scene.shapes.push_back(sq);
    const auto f = synth_scene(scene, 7);

    const auto ts = feature_expand(make_square_template(33, 2.0));
    const auto fs = feature_expand(f);
    ParamLattice lat;
    lat.x0 = {-10.0, 21.0, 32}; // step 1; truth 6 on bin 16
    lat.y0 = {-24.0, 7.0, 32};  // truth -9 on bin 15
    lat.s = {4.0, 16.0, 8};     // geometric; truth on bin 3
    lat.theta = {0.0, pi / 2.0, 16};
    const auto map = probability_map(accumulate(preset_a11(), ts, fs, lat));
    std::size_t best = 0;
    for (std::size_t i = 1; i < map.values.size(); ++i)
        if (map.values[i] > map.values[best]) best = i;
    const auto idx = lat.unravel(best);
    check(std::abs(idx[0] - 16) <= 1, "square x0 bin off by more than one");
    check(std::abs(idx[1] - 15) <= 1, "square y0 bin off by more than one");
    check(std::abs(idx[2] - 3) <= 1, "square s bin off by more than one");
    check(std::abs(idx[3] - 5) <= 1, "square theta bin off by more than one");

    // circle scene: center/radius recovered, theta degenerate
    SceneSpec cscene;
    cscene.width = cscene.height = 96;
    cscene.origin_x = cscene.origin_y = -47.5;
    ShapeSpec circ;
    circ.kind = ShapeSpec::Kind::circle;
    circ.x = 4.0;
    circ.y = -6.0;
    circ.radius = 9.0;
    cscene.shapes.push_back(circ);
    const auto cf = synth_scene(cscene, 0);

    ParamLattice clat;
    clat.x0 = {-11.0, 20.0, 32}; // truth 4 on bin 15
    clat.y0 = {-21.0, 10.0, 32}; // truth -6 on bin 15
    clat.s = {9.0 / std::pow(1.3, 3.0), 9.0 * std::pow(1.3, 4.0), 8};
    clat.theta = {0.0, 2.0 * pi, 4};
    const auto acc = extended_radon(cf, make_circle_curve(1.0, 2.0 * pi / 64.0), clat);
    const auto dets = detect_peaks(probability_map(acc), 0.5, {2, 2, 1, 1});
    check(!dets.empty(), "no circle detection");
    if (!dets.empty()) {
        check(std::abs(dets[0].bin[0] - 15) <= 1, "circle cx bin off by more than one");
        check(std::abs(dets[0].bin[1] - 15) <= 1, "circle cy bin off by more than one");
        check(std::abs(dets[0].bin[2] - 3) <= 1, "circle radius bin off by more than one");
        check(dets[0].theta_degenerate, "circle theta axis not flagged degenerate");
    }
    return out;
}

Outcome superposition_semantics() {
    Outcome out;
    Check check{&out};
    ParamLattice lat;
    lat.x0 = {-4, 4, 9};
    lat.y0 = {-4, 4, 9};
    lat.s = {1, 2, 3};
    lat.theta = {0, 2 * pi, 5};
    testutil::Rng rng(31);
    AmplitudeAccumulator acc;
    acc.lattice = lat;
    acc.cells.resize(lat.cell_count());
    for (auto& c : acc.cells) c = {rng.uniform(-3, 3), rng.uniform(-3, 3)};

    std::vector<AmplitudeAccumulator> two{acc, acc};
    CoefficientSet coeffs;
    coeffs.terms = {{0, {1.0, 0.0}}, {1, {-1.0, 0.0}}};
    const auto zero = probability_map(superpose_accumulators(coeffs, two));
    for (double v : zero.values) check(v <= 1e-12, "duplicated filters with {1,-1} do not cancel");

    for (int i = 0; i < 10000; ++i) {
        const cplx a1{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const cplx a2{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const cplx c1{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const cplx c2{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const double lhs = std::norm(c1 * a1 + c2 * a2);
        const double rhs =
            std::norm(c1 * a1) + std::norm(c2 * a2) + 2.0 * std::real(c1 * a1 * std::conj(c2 * a2));
        check(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, lhs),
              "interference expansion identity beyond 1e-12");
    }
    return out;
}

Outcome sign_invariance() {
    Outcome out;
    Check check{&out};
    const auto t = make_square_template(17, 2.0);
    const auto f = smooth_bumps(48, 2222);
    ScalarGrid neg = f;
    for (double& v : neg.values) v = -v;
    ParamLattice lat;
    lat.x0 = {-8, 8, 17};
    lat.y0 = {-8, 8, 17};
    lat.s = {2, 6, 4};
    lat.theta = {0, pi / 2, 4};
    const auto mp = probability_map(accumulate_a00(t, f, lat));
    const auto mn = probability_map(accumulate_a00(t, neg, lat));
    for (std::size_t i = 0; i < mp.values.size(); ++i)
        check(std::abs(mp.values[i] - mn.values[i]) <= 1e-12 * std::max(1.0, mp.values[i]),
              "probability map changes under contrast negation");
    const auto dp = detect_peaks(mp, 0.5, {1, 1, 1, 1});
    const auto dn = detect_peaks(mn, 0.5, {1, 1, 1, 1});
    check(!dp.empty() && dp.size() == dn.size(), "detection counts differ");
    if (!dp.empty() && dp.size() == dn.size()) {
        check(dp[0].bin == dn[0].bin, "argmax detection moved under negation");
        check(dp[0].probability == dn[0].probability, "argmax probability not bitwise equal");
    }
    return out;
}

Outcome determinism() {
    Outcome out;
    Check check{&out};
    const fs::path dir = "acceptance_tmp";
    fs::create_directories(dir);
    auto file = [&](const std::string& n) { return (dir / n).string(); };
    {
        std::ofstream cfg(file("scene.cfg"));
        cfg << "width = 64\nheight = 64\norigin_x = -31.5\norigin_y = -31.5\n"
               "noise_sigma = 0.02\nseed = 5\noutput = scene.pgm\n"
               "[shape]\nkind = circle\ncx = 3\ncy = -2\nradius = 8\n";
    }
    std::ostringstream sink;
    check(cli::run_cli({"synth", "--config", file("scene.cfg"), "--out", dir.string()}, sink,
                       sink) == 0,
          "synth command failed");
    {
        std::ofstream cfg(file("detect.cfg"));
        cfg << "image = " << file("scene.pgm")
            << "\nimage_origin_x = -31.5\nimage_origin_y = -31.5\n"
               "method = curve\ncurve = circle\ncurve_radius = 1\ncurve_step = "
            << format_g17(pi / 32.0)
            << "\nx0_min = -5\nx0_max = 10\nx0_count = 16\n"
               "y0_min = -10\ny0_max = 5\ny0_count = 16\n"
               "s_min = 5\ns_max = 12\ns_count = 6\n"
               "theta_min = 0\ntheta_max = " << format_g17(2.0 * pi)
            << "\ntheta_count = 4\noutput_prefix = det\n";
    }
    auto run_detect = [&](const std::string& sub, const std::string& threads) {
        std::ostringstream s2;
        return cli::run_cli({"detect", "--config", file("detect.cfg"), "--out",
                             (dir / sub).string(), "--threads", threads},
                            s2, s2) == 0;
    };
    check(run_detect("t1", "1"), "detect --threads 1 failed");
    check(run_detect("t8", "8"), "detect --threads 8 failed");
    check(run_detect("t1b", "1"), "repeat detect failed");
    const std::string a = read_bytes(file("t1/det.amph"));
    const std::string b = read_bytes(file("t8/det.amph"));
    const std::string c = read_bytes(file("t1b/det.amph"));
    check(!a.empty(), "accumulator file missing");
    check(a == b, "accumulator differs between thread counts 1 and 8");
    check(a == c, "accumulator differs between repeat runs");
    fs::remove_all(dir);
    return out;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double time_limit_s;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria{
        {"1. interference-law (closed form vs complex sum, exact cancellation)", 1.0, interference_law},
        {"2. incoherent-limit (10^4 random-phase waves within 5%)", 1.0, incoherent_limit},
        {"3. sinc-oracle (numerical aperture transform vs analytic pattern)", 10.0, sinc_oracle},
        {"4. correlation-equivalence (fft vs direct, impulse identity)", 30.0, correlation_equivalence},
        {"5. radon-properties (linearity, point-mass sinusoid)", 10.0, radon_properties},
        {"6. fourier-slice-theorem (slice vs spectrum and analytic)", 30.0, fourier_slice_theorem},
        {"7. a10-radon-equivalence (64 random lines to 1e-9)", 5.0, a10_radon_equivalence},
        {"8. pose-recovery (square with noise; circle with degenerate theta)", 120.0, pose_recovery},
        {"9. superposition-semantics (cancellation, interference expansion)", 1.0, superposition_semantics},
        {"10. sign-invariance (contrast negation)", 5.0, sign_invariance},
        {"11. determinism (byte-identical accumulators across runs/threads)", 60.0, determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.time_limit_s && out.pass) {
            out.pass = false;
            out.detail = "runtime " + format_g17(secs) + " s exceeds " + format_g17(c.time_limit_s) + " s";
        }
        std::printf("[%s] %s (%.2f s)%s%s\n", out.pass ? "PASS" : "FAIL", c.name, secs,
                    out.detail.empty() ? "" : " -- ", out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("%s: %d/%zu criteria passed\n", failures == 0 ? "OK" : "FAILED",
                int(criteria.size()) - failures, criteria.size());
    return failures;
}
