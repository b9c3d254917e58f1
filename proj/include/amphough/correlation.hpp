#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "amphough/detail/fft.hpp"
#include "amphough/errors.hpp"
#include "amphough/grid.hpp"

namespace amphough {

/**
 * Cross-correlation values over all shifts with any template/image overlap.
 * The grid's frame lives in shift coordinates: sample (ix, iy) is the shift
 * ((ix - zero_shift_ix) * spacing, (iy - zero_shift_iy) * spacing), so the
 * zero-shift cell is identified by (zero_shift_ix, zero_shift_iy) and by
 * the frame origin.
 */
struct CorrelationMap {
    ScalarGrid grid;
    bool normalized = false;
    int zero_shift_ix = 0;
    int zero_shift_iy = 0;
};

namespace detail {

inline void check_correlation_pre(const ScalarGrid& f, const ScalarGrid& t) {
    if (t.width > f.width || t.height > f.height)
        throw TemplateLargerThanImage("template exceeds image in at least one dimension");
    const double rel = std::abs(f.spacing - t.spacing) / f.spacing;
    if (rel > 1e-12)
        throw FrameMismatch("correlation requires image and template with equal spacing");
}

inline CorrelationMap make_shift_map(const ScalarGrid& f, const ScalarGrid& t) {
    CorrelationMap m;
    m.zero_shift_ix = t.width - 1;
    m.zero_shift_iy = t.height - 1;
    m.grid = ScalarGrid(f.width + t.width - 1, f.height + t.height - 1,
                        -(t.width - 1) * f.spacing, -(t.height - 1) * f.spacing, f.spacing);
    return m;
}

} // namespace detail

/**
 * Linear (zero-padded) cross-correlation by direct summation:
 *     C(sx, sy) = sum_{x', y'} f(sx + x', sy + y') * t(x', y') * spacing^2.
 * The kernel is not flipped; shifts run over every offset with overlap.
 * (A physical pinhole gathers spherical waves at a fixed aperture and so
 * produces the point reflection C(-sx, -sy) of this map.)
 */
inline CorrelationMap cross_correlate_direct(const ScalarGrid& f, const ScalarGrid& t) {
    detail::check_correlation_pre(f, t);
    CorrelationMap m = detail::make_shift_map(f, t);
    const double cell = f.spacing * f.spacing;
    for (int iy = 0; iy < m.grid.height; ++iy) {
        const int sy = iy - m.zero_shift_iy;
        const int ty_lo = std::max(0, -sy);
        const int ty_hi = std::min(t.height, f.height - sy);
        for (int ix = 0; ix < m.grid.width; ++ix) {
            const int sx = ix - m.zero_shift_ix;
            const int tx_lo = std::max(0, -sx);
            const int tx_hi = std::min(t.width, f.width - sx);
            double acc = 0.0;
            for (int ty = ty_lo; ty < ty_hi; ++ty)
                for (int tx = tx_lo; tx < tx_hi; ++tx)
                    acc += f.at(sx + tx, sy + ty) * t.at(tx, ty);
            m.grid.at(ix, iy) = acc * cell;
        }
    }
    return m;
}

/**
 * Same contract as cross_correlate_direct, evaluated through zero-padded
 * Fourier transforms and a conjugate spectrum product. The imaginary
 * residue of the inverse transform is discarded only after checking it is
 * below 1e-9 of the map's largest magnitude; a larger residue signals an
 * implementation bug and raises FourierResidueTooLarge.
 */
inline CorrelationMap cross_correlate_fft(const ScalarGrid& f, const ScalarGrid& t) {
    detail::check_correlation_pre(f, t);
    CorrelationMap m = detail::make_shift_map(f, t);

    const std::size_t w2 = detail::next_pow2(static_cast<std::size_t>(m.grid.width));
    const std::size_t h2 = detail::next_pow2(static_cast<std::size_t>(m.grid.height));
    std::vector<detail::cplx> fa(w2 * h2), tb(w2 * h2);
    for (int iy = 0; iy < f.height; ++iy)
        for (int ix = 0; ix < f.width; ++ix) fa[iy * w2 + ix] = f.at(ix, iy);
    for (int iy = 0; iy < t.height; ++iy)
        for (int ix = 0; ix < t.width; ++ix) tb[iy * w2 + ix] = t.at(ix, iy);

    detail::transform_2d(fa, w2, h2, -1);
    detail::transform_2d(tb, w2, h2, -1);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= std::conj(tb[i]);
    detail::transform_2d(fa, w2, h2, +1);
    const double inv_n = 1.0 / (double(w2) * double(h2));

    const double cell = f.spacing * f.spacing;
    double max_mag = 0.0, max_imag = 0.0;
    for (int iy = 0; iy < m.grid.height; ++iy) {
        const std::size_t cy = static_cast<std::size_t>((iy - m.zero_shift_iy + int(h2)) % int(h2));
        for (int ix = 0; ix < m.grid.width; ++ix) {
            const std::size_t cx = static_cast<std::size_t>((ix - m.zero_shift_ix + int(w2)) % int(w2));
            const detail::cplx v = fa[cy * w2 + cx] * inv_n;
            max_mag = std::max(max_mag, std::abs(v));
            max_imag = std::max(max_imag, std::abs(v.imag()));
            m.grid.at(ix, iy) = v.real() * cell;
        }
    }
    if (max_mag > 0.0 && max_imag > 1e-9 * max_mag)
        throw FourierResidueTooLarge("imaginary residue of FFT correlation exceeds 1e-9 of the peak");
    return m;
}

/// Autocorrelation of a template (its "feature point spread function").
inline CorrelationMap autocorrelate(const ScalarGrid& t) { return cross_correlate_direct(t, t); }

/**
 * Optional post-step dividing each correlation cell by
 * sqrt(energy(t) * local energy(f)), where the local energy is taken over
 * the template footprint at that shift (zero outside the image). Cells
 * whose denominator vanishes are set to zero.
 */
inline CorrelationMap normalize_correlation(const CorrelationMap& m, const ScalarGrid& f,
                                            const ScalarGrid& t) {
    detail::check_correlation_pre(f, t);
    if (m.grid.width != f.width + t.width - 1 || m.grid.height != f.height + t.height - 1)
        throw FrameMismatch("correlation map shape does not match the (image, template) pair");
    const double cell = f.spacing * f.spacing;
    double t_energy = 0.0;
    for (double v : t.values) t_energy += v * v;
    t_energy *= cell;

    CorrelationMap out = m;
    out.normalized = true;
    for (int iy = 0; iy < m.grid.height; ++iy) {
        const int sy = iy - m.zero_shift_iy;
        const int ty_lo = std::max(0, -sy);
        const int ty_hi = std::min(t.height, f.height - sy);
        for (int ix = 0; ix < m.grid.width; ++ix) {
            const int sx = ix - m.zero_shift_ix;
            const int tx_lo = std::max(0, -sx);
            const int tx_hi = std::min(t.width, f.width - sx);
            double f_energy = 0.0;
            for (int ty = ty_lo; ty < ty_hi; ++ty)
                for (int tx = tx_lo; tx < tx_hi; ++tx) {
                    const double v = f.at(sx + tx, sy + ty);
                    f_energy += v * v;
                }
            f_energy *= cell;
            const double denom = std::sqrt(t_energy * f_energy);
            out.grid.at(ix, iy) = denom > 0.0 ? m.grid.at(ix, iy) / denom : 0.0;
        }
    }
    return out;
}

/**
 * Unnormalized 2-D discrete Fourier transform with kernel
 * exp(-2*pi*i*(u*x/W + v*y/H)); the inverse applies the conjugate kernel
 * and the 1/(W*H) factor. The frame fields are carried over verbatim
 * (spectra are indexed in bins, not physical coordinates).
 */
template <typename T>
ComplexGrid dft2(const Grid<T>& g) {
    std::vector<detail::cplx> buf(g.values.begin(), g.values.end());
    detail::transform_2d(buf, static_cast<std::size_t>(g.width), static_cast<std::size_t>(g.height), -1);
    ComplexGrid out(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    out.values = std::move(buf);
    return out;
}

inline ComplexGrid idft2(const ComplexGrid& g) {
    std::vector<detail::cplx> buf = g.values;
    detail::transform_2d(buf, static_cast<std::size_t>(g.width), static_cast<std::size_t>(g.height), +1);
    const double inv_n = 1.0 / (double(g.width) * double(g.height));
    ComplexGrid out(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    out.values = std::move(buf);
    for (auto& v : out.values) v *= inv_n;
    return out;
}

} // namespace amphough
