#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "amphough/errors.hpp"

namespace amphough {

/**
 * 2-D sampled field with a physical coordinate frame.
 *
 * Sample (ix, iy) sits at physical position
 *     (origin_x + ix * spacing, origin_y + iy * spacing);
 * values are stored row-major: values[iy * width + ix]. Pixels are square.
 *
 * Grids are immutable by convention: every operation below is a pure
 * function returning a fresh grid, so values can be shared across threads.
 */
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double spacing = 1.0;
    std::vector<T> values;

    Grid() = default;

    Grid(int w, int h, double ox = 0.0, double oy = 0.0, double sp = 1.0, T fill = T{})
        : width(w), height(h), origin_x(ox), origin_y(oy), spacing(sp) {
        if (w <= 0 || h <= 0) throw Error("grid dimensions must be positive");
        if (!(sp > 0.0)) throw Error("grid spacing must be positive");
        values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
    }

    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(ix);
    }
    T& at(int ix, int iy) { return values[index(ix, iy)]; }
    const T& at(int ix, int iy) const { return values[index(ix, iy)]; }

    double x_at(int ix) const { return origin_x + ix * spacing; }
    double y_at(int iy) const { return origin_y + iy * spacing; }

    std::size_t cell_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

    template <typename U>
    bool same_frame(const Grid<U>& o) const {
        return width == o.width && height == o.height && origin_x == o.origin_x &&
               origin_y == o.origin_y && spacing == o.spacing;
    }

    /// Copies the frame fields (not the values) of another grid.
    template <typename U>
    void adopt_frame(const Grid<U>& o) {
        width = o.width;
        height = o.height;
        origin_x = o.origin_x;
        origin_y = o.origin_y;
        spacing = o.spacing;
    }
};

using ScalarGrid = Grid<double>;
using ComplexGrid = Grid<std::complex<double>>;

namespace detail {
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const std::complex<double>& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}
} // namespace detail

/// Checks the type invariants (size, spacing, finiteness); throws Error on violation.
template <typename T>
void validate(const Grid<T>& g) {
    if (g.width <= 0 || g.height <= 0) throw Error("grid dimensions must be positive");
    if (!(g.spacing > 0.0)) throw Error("grid spacing must be positive");
    if (!std::isfinite(g.origin_x) || !std::isfinite(g.origin_y) || !std::isfinite(g.spacing))
        throw Error("grid frame fields must be finite");
    if (g.values.size() != g.cell_count()) throw Error("grid value count does not match width*height");
    for (const T& v : g.values)
        if (!detail::finite(v)) throw Error("grid contains a non-finite value");
}

/**
 * Bilinear interpolation at a physical point. Points outside the hull of
 * the sample positions return zero (zero-padding convention); queries at
 * exact sample positions reproduce the stored value.
 */
template <typename T>
T sample_bilinear(const Grid<T>& g, double x, double y) {
    const double u = (x - g.origin_x) / g.spacing;
    const double v = (y - g.origin_y) / g.spacing;
    if (!(u >= 0.0) || !(v >= 0.0) || !(u <= g.width - 1) || !(v <= g.height - 1)) return T{};

    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    double fx = u - i0;
    double fy = v - j0;
    if (i0 >= g.width - 1) { i0 = g.width - 1; fx = 0.0; }
    if (j0 >= g.height - 1) { j0 = g.height - 1; fy = 0.0; }
    const int i1 = (fx > 0.0) ? i0 + 1 : i0;
    const int j1 = (fy > 0.0) ? j0 + 1 : j0;

    const T v00 = g.at(i0, j0);
    const T v10 = g.at(i1, j0);
    const T v01 = g.at(i0, j1);
    const T v11 = g.at(i1, j1);
    const T a = v00 + fx * (v10 - v00);
    const T b = v01 + fx * (v11 - v01);
    return a + fy * (b - a);
}

/**
 * Partial derivatives (d/dx, d/dy) by central differences on the interior
 * and one-sided differences on the borders, divided by the grid spacing.
 */
inline std::pair<ScalarGrid, ScalarGrid> gradient(const ScalarGrid& g) {
    if (g.width < 3 || g.height < 3)
        throw GridTooSmall("gradient requires a grid of at least 3x3 samples");
    ScalarGrid gx(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    ScalarGrid gy(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    const double inv_h = 1.0 / g.spacing;
    const double inv_2h = 0.5 / g.spacing;
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            double dx;
            if (ix == 0)
                dx = (g.at(1, iy) - g.at(0, iy)) * inv_h;
            else if (ix == g.width - 1)
                dx = (g.at(ix, iy) - g.at(ix - 1, iy)) * inv_h;
            else
                dx = (g.at(ix + 1, iy) - g.at(ix - 1, iy)) * inv_2h;
            double dy;
            if (iy == 0)
                dy = (g.at(ix, 1) - g.at(ix, 0)) * inv_h;
            else if (iy == g.height - 1)
                dy = (g.at(ix, iy) - g.at(ix, iy - 1)) * inv_h;
            else
                dy = (g.at(ix, iy + 1) - g.at(ix, iy - 1)) * inv_2h;
            gx.at(ix, iy) = dx;
            gy.at(ix, iy) = dy;
        }
    }
    return {std::move(gx), std::move(gy)};
}

/// Pointwise magnitude sqrt(gx^2 + gy^2) of the gradient field.
inline ScalarGrid gradient_magnitude(const ScalarGrid& g) {
    auto [gx, gy] = gradient(g);
    ScalarGrid out(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = std::hypot(gx.values[i], gy.values[i]);
    return out;
}

/**
 * Five-point Laplacian (f[i+1,j] + f[i-1,j] + f[i,j+1] + f[i,j-1] - 4 f[i,j]) / spacing^2
 * on the interior; border cells are set to zero.
 */
inline ScalarGrid laplacian(const ScalarGrid& g) {
    if (g.width < 3 || g.height < 3)
        throw GridTooSmall("laplacian requires a grid of at least 3x3 samples");
    ScalarGrid out(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    const double inv_h2 = 1.0 / (g.spacing * g.spacing);
    for (int iy = 1; iy < g.height - 1; ++iy)
        for (int ix = 1; ix < g.width - 1; ++ix)
            out.at(ix, iy) = (g.at(ix + 1, iy) + g.at(ix - 1, iy) + g.at(ix, iy + 1) +
                              g.at(ix, iy - 1) - 4.0 * g.at(ix, iy)) *
                             inv_h2;
    return out;
}

/// Binary mask: 1 where the input is strictly greater than level, else 0.
inline ScalarGrid threshold_binary(const ScalarGrid& g, double level) {
    ScalarGrid out(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        out.values[i] = (g.values[i] > level) ? 1.0 : 0.0;
    return out;
}

/**
 * Taylor-like expansion of an image into derived feature grids: the raw
 * values, the gradient pair, the gradient magnitude and the Laplacian,
 * plus an optional binary edge mask (gradient magnitude thresholded at
 * threshold_level). All members share the input's frame.
 */
struct FeatureStack {
    ScalarGrid base;
    ScalarGrid grad_x;
    ScalarGrid grad_y;
    ScalarGrid grad_mag;
    ScalarGrid laplacian;
    std::optional<ScalarGrid> thresholded;
    double threshold_level = 0.0;
};

inline FeatureStack feature_expand(const ScalarGrid& g,
                                   std::optional<double> threshold_level = std::nullopt) {
    if (g.width < 3 || g.height < 3)
        throw GridTooSmall("feature_expand requires a grid of at least 3x3 samples");
    FeatureStack out;
    out.base = g;
    auto [gx, gy] = gradient(g);
    out.grad_x = std::move(gx);
    out.grad_y = std::move(gy);
    out.grad_mag = ScalarGrid(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        out.grad_mag.values[i] = std::hypot(out.grad_x.values[i], out.grad_y.values[i]);
    out.laplacian = laplacian(g);
    if (threshold_level) {
        out.threshold_level = *threshold_level;
        out.thresholded = threshold_binary(out.grad_mag, *threshold_level);
    }
    return out;
}

} // namespace amphough
