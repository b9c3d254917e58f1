#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "amphough/detail/parallel.hpp"
#include "amphough/errors.hpp"
#include "amphough/grid.hpp"

namespace amphough {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/**
 * Element of the four-parameter 2-D similarity group: translation
 * (x0, y0), isotropic scale s > 0 and rotation theta, acting on template
 * coordinates (u, v) as
 *     x = x0 + s*(u cos theta - v sin theta)
 *     y = y0 + s*(u sin theta + v cos theta).
 * theta is kept normalized to [0, 2*pi).
 */
struct GroupElement {
    double x0 = 0.0;
    double y0 = 0.0;
    double s = 1.0;
    double theta = 0.0;

    GroupElement() = default;
    GroupElement(double tx, double ty, double scale, double angle) : x0(tx), y0(ty), s(scale) {
        if (!(scale > 0.0)) throw Error("group scale must be positive");
        theta = std::fmod(angle, 2.0 * std::numbers::pi);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    }
};

inline Vec2 group_apply(const GroupElement& g, double u, double v) {
    const double c = std::cos(g.theta);
    const double sn = std::sin(g.theta);
    return {g.x0 + g.s * (u * c - v * sn), g.y0 + g.s * (u * sn + v * c)};
}

/// g^-1, satisfying group_apply(group_inverse(g), group_apply(g, p)) == p.
inline GroupElement group_inverse(const GroupElement& g) {
    const double c = std::cos(g.theta);
    const double sn = std::sin(g.theta);
    const double inv_s = 1.0 / g.s;
    return {-(c * g.x0 + sn * g.y0) * inv_s, -(-sn * g.x0 + c * g.y0) * inv_s, inv_s, -g.theta};
}

/// Composition: group_apply(compose(a, b), p) == group_apply(a, group_apply(b, p)).
inline GroupElement compose(const GroupElement& a, const GroupElement& b) {
    const Vec2 t = group_apply(a, b.x0, b.y0);
    return {t.x, t.y, a.s * b.s, a.theta + b.theta};
}

/// Jacobian |J| = s^-2 of the pull-back change of variables.
inline double jacobian(const GroupElement& g) { return 1.0 / (g.s * g.s); }

// ---------------------------------------------------------------------------
// Parameter lattice
// ---------------------------------------------------------------------------

struct AxisSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 1;
};

/**
 * Discretized group-parameter domain, iterated row-major in
 * (x0, y0, s, theta) with theta varying fastest.
 *
 * x0 and y0 use inclusive linear lattices (count == 1 pins the axis at
 * min). The s axis is geometric (log-uniform) by default because scale
 * acts multiplicatively; set s_geometric = false for linear spacing. The
 * theta axis is half-open with step (max - min)/count, and theta_wraps
 * marks it cyclic for neighborhood logic downstream.
 */
struct ParamLattice {
    AxisSpec x0, y0, s, theta;
    bool s_geometric = true;
    bool theta_wraps = true;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(x0.count) * y0.count * s.count * theta.count;
    }

    std::size_t index(int ix, int iy, int is, int it) const {
        return ((static_cast<std::size_t>(ix) * y0.count + iy) * s.count + is) * theta.count + it;
    }

    std::array<int, 4> unravel(std::size_t flat) const {
        std::array<int, 4> idx{};
        idx[3] = static_cast<int>(flat % theta.count);
        flat /= theta.count;
        idx[2] = static_cast<int>(flat % s.count);
        flat /= s.count;
        idx[1] = static_cast<int>(flat % y0.count);
        idx[0] = static_cast<int>(flat / y0.count);
        return idx;
    }

    double x0_at(int i) const { return linear_at(x0, i); }
    double y0_at(int i) const { return linear_at(y0, i); }
    double s_at(int i) const {
        if (s.count == 1) return s.min;
        if (!s_geometric) return linear_at(s, i);
        return s.min * std::pow(s.max / s.min, double(i) / double(s.count - 1));
    }
    double theta_at(int i) const { return theta.min + i * (theta.max - theta.min) / theta.count; }

    GroupElement element_at(int ix, int iy, int is, int it) const {
        return {x0_at(ix), y0_at(iy), s_at(is), theta_at(it)};
    }
    GroupElement element_at(std::size_t flat) const {
        const auto idx = unravel(flat);
        return element_at(idx[0], idx[1], idx[2], idx[3]);
    }

    static double linear_at(const AxisSpec& a, int i) {
        if (a.count == 1) return a.min;
        return a.min + i * (a.max - a.min) / (a.count - 1);
    }
};

inline bool same_lattice(const ParamLattice& a, const ParamLattice& b) {
    auto axis_eq = [](const AxisSpec& p, const AxisSpec& q) {
        return p.min == q.min && p.max == q.max && p.count == q.count;
    };
    return axis_eq(a.x0, b.x0) && axis_eq(a.y0, b.y0) && axis_eq(a.s, b.s) &&
           axis_eq(a.theta, b.theta) && a.s_geometric == b.s_geometric &&
           a.theta_wraps == b.theta_wraps;
}

inline void validate_lattice(const ParamLattice& l) {
    for (const AxisSpec* a : {&l.x0, &l.y0, &l.s, &l.theta}) {
        if (a->count < 1) throw BadLattice("lattice axis count must be >= 1");
        if (!(a->max >= a->min)) throw BadLattice("lattice axis max must be >= min");
        if (!std::isfinite(a->min) || !std::isfinite(a->max))
            throw BadLattice("lattice axis bounds must be finite");
    }
    if (!(l.s.min > 0.0)) throw BadLattice("lattice s axis must be positive");
}

// ---------------------------------------------------------------------------
// Template curves
// ---------------------------------------------------------------------------

/**
 * Parametric template curve sampled at uniform arclength steps in
 * template coordinates. `step` is the realized arclength increment
 * between consecutive samples (measured along the curve).
 */
struct TemplateCurve {
    enum class Kind { line_segment, circle, polyline };
    Kind kind = Kind::polyline;
    std::vector<Vec2> samples;
    double step = 0.0;
};

/// Segment of the given length along the v-axis, centered on the origin.
/// Produces floor(length / step) + 1 samples.
inline TemplateCurve make_line_curve(double length, double step) {
    if (!(length > 0.0) || !(step > 0.0)) throw BadGeometry("line curve needs positive length and step");
    TemplateCurve c;
    c.kind = TemplateCurve::Kind::line_segment;
    c.step = step;
    const int count = static_cast<int>(std::floor(length / step)) + 1;
    c.samples.reserve(static_cast<std::size_t>(count));
    for (int m = 0; m < count; ++m) c.samples.push_back({0.0, -length / 2.0 + m * step});
    return c;
}

/// Circle of the given radius about the template origin; the sample count
/// is rounded so the lattice closes exactly (angle step 2*pi/N).
inline TemplateCurve make_circle_curve(double radius, double step) {
    if (!(radius > 0.0) || !(step > 0.0)) throw BadGeometry("circle curve needs positive radius and step");
    TemplateCurve c;
    c.kind = TemplateCurve::Kind::circle;
    const long n = std::max<long>(3, std::llround(2.0 * std::numbers::pi * radius / step));
    const double dalpha = 2.0 * std::numbers::pi / double(n);
    c.step = radius * dalpha;
    c.samples.reserve(static_cast<std::size_t>(n));
    for (long m = 0; m < n; ++m)
        c.samples.push_back({radius * std::cos(m * dalpha), radius * std::sin(m * dalpha)});
    return c;
}

/// Resamples a vertex chain (optionally closed) at uniform arclength steps.
inline TemplateCurve make_polyline_curve(const std::vector<Vec2>& vertices, double step,
                                         bool closed = false) {
    if (vertices.size() < 2) throw BadGeometry("polyline needs at least two vertices");
    if (!(step > 0.0)) throw BadGeometry("polyline step must be positive");
    std::vector<Vec2> verts = vertices;
    if (closed) verts.push_back(vertices.front());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i)
        total += std::hypot(verts[i + 1].x - verts[i].x, verts[i + 1].y - verts[i].y);
    if (!(total > 0.0)) throw BadGeometry("polyline has zero length");

    TemplateCurve c;
    c.kind = TemplateCurve::Kind::polyline;
    c.step = step;
    double want = 0.0;     // next arclength position to emit
    double walked = 0.0;   // arclength consumed so far
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        const double seg = std::hypot(verts[i + 1].x - verts[i].x, verts[i + 1].y - verts[i].y);
        if (seg == 0.0) continue;
        while (want <= walked + seg + 1e-12 * total && want <= total + 1e-12 * total) {
            const double f = (want - walked) / seg;
            c.samples.push_back({verts[i].x + f * (verts[i + 1].x - verts[i].x),
                                 verts[i].y + f * (verts[i + 1].y - verts[i].y)});
            want += step;
        }
        walked += seg;
    }
    if (c.samples.size() < 2) throw BadGeometry("polyline step too large for its length");
    return c;
}

// ---------------------------------------------------------------------------
// Extended Radon transform
// ---------------------------------------------------------------------------

/// Complex evidence per cell of a group-parameter lattice; the squared
/// magnitude of a cell is the detection probability map.
struct AmplitudeAccumulator {
    ParamLattice lattice;
    std::vector<std::complex<double>> cells;
};

/**
 * Radon transform extended over the similarity group: for every lattice
 * cell g the template curve is mapped into the image by g and f is
 * integrated along it,
 *     A(g) = sum_i f(g(u_i, v_i)) * step,
 * with bilinear sampling and zeros outside the grid. The curve measure is
 * arclength in template coordinates, so a cell's evidence budget does not
 * grow with s; weighting by image-space arclength instead would multiply
 * each cell by s. The real data path stores zero imaginary parts. Cells
 * are written exactly once each, so the result is independent of the
 * thread count.
 */
inline AmplitudeAccumulator extended_radon(const ScalarGrid& f, const TemplateCurve& curve,
                                           const ParamLattice& lattice, int threads = 0) {
    validate_lattice(lattice);
    if (curve.samples.size() < 2) throw BadGeometry("template curve has too few samples");
    AmplitudeAccumulator acc;
    acc.lattice = lattice;
    acc.cells.assign(lattice.cell_count(), {0.0, 0.0});

    detail::parallel_for(acc.cells.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t flat = begin; flat < end; ++flat) {
            const auto idx = lattice.unravel(flat);
            const double x0 = lattice.x0_at(idx[0]);
            const double y0 = lattice.y0_at(idx[1]);
            const double s = lattice.s_at(idx[2]);
            const double theta = lattice.theta_at(idx[3]);
            const double c = std::cos(theta);
            const double sn = std::sin(theta);
            double sum = 0.0;
            for (const Vec2& p : curve.samples)
                sum += sample_bilinear(f, x0 + s * (p.x * c - p.y * sn),
                                       y0 + s * (p.x * sn + p.y * c));
            acc.cells[flat] = {sum * curve.step, 0.0};
        }
    });
    return acc;
}

} // namespace amphough
