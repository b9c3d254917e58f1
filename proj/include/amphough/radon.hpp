#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "amphough/errors.hpp"
#include "amphough/grid.hpp"
#include "amphough/image_io.hpp"
#include "amphough/wave.hpp"

namespace amphough {

/**
 * Sampled line-integral transform. Columns are angles phi sampled
 * uniformly on [0, pi) (phi and phi+pi describe the same line with the
 * sign of r flipped, so the half-open range covers every line once);
 * rows are signed offsets r on an inclusive lattice [r_min, r_max].
 */
struct Sinogram {
    double r_min = 0.0;
    double r_max = 0.0;
    int n_r = 0;
    int n_phi = 0;
    std::vector<double> values; // values[iphi * n_r + ir]

    double delta_r() const { return (r_max - r_min) / (n_r - 1); }
    double r_at(int ir) const { return r_min + ir * delta_r(); }
    double phi_at(int iphi) const { return iphi * std::numbers::pi / n_phi; }
    double& at(int ir, int iphi) { return values[static_cast<std::size_t>(iphi) * n_r + ir]; }
    double at(int ir, int iphi) const { return values[static_cast<std::size_t>(iphi) * n_r + ir]; }
};

/// Implicit line x*nx + y*ny = offset with unit normal (nx, ny) = (cos phi, sin phi);
/// offset is the signed perpendicular distance of the line from the origin.
struct LineParams {
    double nx = 1.0;
    double ny = 0.0;
    double offset = 0.0;
};

inline LineParams line_from_params(double r, double phi) {
    return {std::cos(phi), std::sin(phi), r};
}

namespace detail {

/**
 * Line integral of f along {anchor + t * dir}, |dir| = 1, sampled at
 * midpoints t = -L + (m + 0.5) * dt with L the largest projection of the
 * sample-hull corners onto dir. Samples outside the hull read zero, so
 * lines missing the grid integrate to zero.
 */
inline double integrate_line(const ScalarGrid& f, double ax, double ay, double dx, double dy,
                             double dt) {
    const double cx0 = f.origin_x, cx1 = f.x_at(f.width - 1);
    const double cy0 = f.origin_y, cy1 = f.y_at(f.height - 1);
    double span = 0.0;
    for (double cx : {cx0, cx1})
        for (double cy : {cy0, cy1})
            span = std::max(span, std::abs((cx - ax) * dx + (cy - ay) * dy));
    const long n = static_cast<long>(std::ceil(2.0 * span / dt));
    double acc = 0.0;
    for (long m = 0; m < n; ++m) {
        const double t = -span + (m + 0.5) * dt;
        acc += sample_bilinear(f, ax + t * dx, ay + t * dy);
    }
    return acc * dt;
}

} // namespace detail

/**
 * Discrete Radon transform: each (r, phi) cell holds the integral of f
 * along the line x*cos(phi) + y*sin(phi) = r, realized by stepping the
 * line with bilinear interpolation. The step defaults to spacing / 2,
 * which keeps per-column mass consistent to well under 1%; pass line_step
 * to trade accuracy against cost.
 */
inline Sinogram radon_transform(const ScalarGrid& f, double r_min, double r_max, int n_r,
                                int n_phi, double line_step = 0.0) {
    if (n_r < 2 || n_phi < 1) throw BadLattice("radon lattice needs n_r >= 2 and n_phi >= 1");
    if (!(r_min < r_max)) throw BadLattice("radon lattice needs r_min < r_max");
    if (line_step < 0.0) throw BadLattice("line step must be positive");
    Sinogram s;
    s.r_min = r_min;
    s.r_max = r_max;
    s.n_r = n_r;
    s.n_phi = n_phi;
    s.values.assign(static_cast<std::size_t>(n_r) * n_phi, 0.0);
    const double dt = line_step > 0.0 ? line_step : f.spacing / 2.0;
    for (int iphi = 0; iphi < n_phi; ++iphi) {
        const double phi = s.phi_at(iphi);
        const double c = std::cos(phi);
        const double sn = std::sin(phi);
        for (int ir = 0; ir < n_r; ++ir) {
            const double r = s.r_at(ir);
            s.at(ir, iphi) = detail::integrate_line(f, r * c, r * sn, -sn, c, dt);
        }
    }
    return s;
}

struct FourierSliceResult {
    std::vector<Amplitude> values;
    bool nyquist_exceeded = false; // warning only; values are still returned
};

/**
 * Central-slice transform: the 1-D continuous-kernel Fourier transform
 * (over r) of the phi-projection of f, evaluated at arbitrary spatial
 * frequencies k (cycles per unit length) by direct summation. Equals the
 * 2-D spectrum of f sampled along the ray (k cos phi, k sin phi).
 * Frequencies beyond the grid Nyquist limit 1/(2*spacing) only set the
 * warning flag.
 */
inline FourierSliceResult fourier_slice(const ScalarGrid& f, double phi,
                                        std::span<const double> k_samples) {
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    const double dr = f.spacing / 2.0;

    // projection extent of the sample hull onto the line normal
    double r_lo = 0.0, r_hi = 0.0;
    bool first = true;
    for (double cx : {f.origin_x, f.x_at(f.width - 1)})
        for (double cy : {f.origin_y, f.y_at(f.height - 1)}) {
            const double p = cx * c + cy * sn;
            r_lo = first ? p : std::min(r_lo, p);
            r_hi = first ? p : std::max(r_hi, p);
            first = false;
        }
    r_lo -= dr;
    r_hi += dr;
    const long n = static_cast<long>(std::ceil((r_hi - r_lo) / dr)) + 1;

    std::vector<double> column(static_cast<std::size_t>(n));
    for (long m = 0; m < n; ++m) {
        const double r = r_lo + m * dr;
        column[static_cast<std::size_t>(m)] = detail::integrate_line(f, r * c, r * sn, -sn, c, f.spacing / 2.0);
    }

    FourierSliceResult out;
    const double nyquist = 1.0 / (2.0 * f.spacing);
    auto sinc = [](double a) {
        return a == 0.0 ? 1.0 : std::sin(std::numbers::pi * a) / (std::numbers::pi * a);
    };
    out.values.reserve(k_samples.size());
    for (double k : k_samples) {
        if (std::abs(k) > nyquist) out.nyquist_exceeded = true;
        Amplitude acc{0.0, 0.0};
        for (long m = 0; m < n; ++m) {
            const double r = r_lo + m * dr;
            const double phase = -two_pi * r * k;
            acc += column[static_cast<std::size_t>(m)] * Amplitude{std::cos(phase), std::sin(phase)};
        }
        // bilinear reconstruction low-passes the slice by the tent-kernel
        // transfer sinc^2 per axis; divide it back out (valid below Nyquist)
        const double sx = sinc(k * c * f.spacing);
        const double sy = sinc(k * sn * f.spacing);
        out.values.push_back(acc * (dr / (sx * sx * sy * sy)));
    }
    return out;
}

/**
 * Sinogram CSV: header row carries the r lattice, the first column the
 * phi lattice, both in %.17g.
 */
inline void write_sinogram_csv(const std::string& path, const Sinogram& s) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "phi_r";
    for (int ir = 0; ir < s.n_r; ++ir) out << "," << format_g17(s.r_at(ir));
    out << "\n";
    for (int iphi = 0; iphi < s.n_phi; ++iphi) {
        out << format_g17(s.phi_at(iphi));
        for (int ir = 0; ir < s.n_r; ++ir) out << "," << format_g17(s.at(ir, iphi));
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

inline Sinogram read_sinogram_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty sinogram CSV: " + path);
    std::vector<double> r_axis;
    {
        std::istringstream ls(line);
        std::string field;
        bool corner = true;
        while (std::getline(ls, field, ',')) {
            if (corner) {
                corner = false;
                continue;
            }
            r_axis.push_back(std::stod(field));
        }
    }
    if (r_axis.size() < 2) throw IoError("sinogram CSV header needs at least two r values: " + path);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
        if (row.size() != r_axis.size() + 1) throw IoError("ragged sinogram CSV row: " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("sinogram CSV has no phi rows: " + path);
    Sinogram s;
    s.r_min = r_axis.front();
    s.r_max = r_axis.back();
    s.n_r = static_cast<int>(r_axis.size());
    s.n_phi = static_cast<int>(rows.size());
    s.values.resize(static_cast<std::size_t>(s.n_r) * s.n_phi);
    for (int iphi = 0; iphi < s.n_phi; ++iphi)
        for (int ir = 0; ir < s.n_r; ++ir) s.at(ir, iphi) = rows[iphi][ir + 1];
    return s;
}

/// Sinogram rendered as a grid (for PGM heatmap export): x = r bins, y = phi rows.
inline ScalarGrid sinogram_to_grid(const Sinogram& s) {
    ScalarGrid g(s.n_r, s.n_phi, s.r_min, 0.0, s.delta_r());
    g.values = s.values;
    return g;
}

} // namespace amphough
