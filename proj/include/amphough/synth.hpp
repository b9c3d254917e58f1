#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "amphough/errors.hpp"
#include "amphough/grid.hpp"
#include "amphough/group.hpp"
#include "amphough/image_io.hpp"

namespace amphough {

/**
 * One synthetic scene element. Which fields matter depends on kind:
 *   point:  x, y (stamped onto the nearest pixel)
 *   line:   r, phi (normal form x cos phi + y sin phi = r, drawn across the grid)
 *   circle: x, y center and radius (one-pixel outline)
 *   square: pose (filled image of the canonical square [-1, 1]^2)
 */
struct ShapeSpec {
    enum class Kind { point, line, circle, square };
    Kind kind = Kind::point;
    double x = 0.0, y = 0.0;
    double r = 0.0, phi = 0.0;
    double radius = 0.0;
    GroupElement pose{};
    double value = 1.0;
};

struct SceneSpec {
    int width = 0, height = 0;
    double origin_x = 0.0, origin_y = 0.0;
    double spacing = 1.0;
    double noise_sigma = 0.0;
    std::vector<ShapeSpec> shapes;
};

namespace detail {

inline void stamp_nearest(ScalarGrid& g, double x, double y, double value) {
    const long ix = std::lround((x - g.origin_x) / g.spacing);
    const long iy = std::lround((y - g.origin_y) / g.spacing);
    if (ix < 0 || iy < 0 || ix >= g.width || iy >= g.height) return;
    double& cell = g.at(static_cast<int>(ix), static_cast<int>(iy));
    cell = std::max(cell, value);
}

// Deterministic standard-normal stream: mt19937_64 bits mapped to doubles
// by hand so the output does not depend on the standard library's
// distribution implementation.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
    double next() {
        const double u1 = 1.0 - to_unit(rng_()); // (0, 1]
        const double u2 = to_unit(rng_());       // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    static double to_unit(std::uint64_t x) { return double(x >> 11) * 0x1.0p-53; }
    std::mt19937_64 rng_;
};

} // namespace detail

/**
 * Renders a scene deterministically: shapes are painted in order (max
 * blending), then white Gaussian noise with the given sigma is added
 * pixel by pixel in row-major order from the seed.
 */
inline ScalarGrid synth_scene(const SceneSpec& scene, std::uint64_t seed) {
    if (scene.width <= 0 || scene.height <= 0) throw BadScene("scene dimensions must be positive");
    if (!(scene.spacing > 0.0)) throw BadScene("scene spacing must be positive");
    if (scene.noise_sigma < 0.0) throw BadScene("noise sigma must be non-negative");
    ScalarGrid g(scene.width, scene.height, scene.origin_x, scene.origin_y, scene.spacing);

    for (const ShapeSpec& shape : scene.shapes) {
        switch (shape.kind) {
            case ShapeSpec::Kind::point:
                detail::stamp_nearest(g, shape.x, shape.y, shape.value);
                break;
            case ShapeSpec::Kind::line: {
                const double c = std::cos(shape.phi), sn = std::sin(shape.phi);
                const double ax = shape.r * c, ay = shape.r * sn;
                double span = 0.0;
                for (double cx : {g.origin_x, g.x_at(g.width - 1)})
                    for (double cy : {g.origin_y, g.y_at(g.height - 1)})
                        span = std::max(span, std::abs((cx - ax) * -sn + (cy - ay) * c));
                const double dt = g.spacing / 4.0;
                for (double t = -span; t <= span; t += dt)
                    detail::stamp_nearest(g, ax - t * sn, ay + t * c, shape.value);
                break;
            }
            case ShapeSpec::Kind::circle: {
                if (!(shape.radius > 0.0)) throw BadScene("circle radius must be positive");
                const long n = std::max<long>(
                    16, std::llround(2.0 * std::numbers::pi * shape.radius / (g.spacing / 4.0)));
                for (long m = 0; m < n; ++m) {
                    const double a = 2.0 * std::numbers::pi * double(m) / double(n);
                    detail::stamp_nearest(g, shape.x + shape.radius * std::cos(a),
                                          shape.y + shape.radius * std::sin(a), shape.value);
                }
                break;
            }
            case ShapeSpec::Kind::square: {
                const GroupElement inv = group_inverse(shape.pose);
                for (int iy = 0; iy < g.height; ++iy)
                    for (int ix = 0; ix < g.width; ++ix) {
                        const Vec2 q = group_apply(inv, g.x_at(ix), g.y_at(iy));
                        if (std::abs(q.x) <= 1.0 && std::abs(q.y) <= 1.0) {
                            double& cell = g.at(ix, iy);
                            cell = std::max(cell, shape.value);
                        }
                    }
                break;
            }
        }
    }

    if (scene.noise_sigma > 0.0) {
        detail::NormalStream noise(seed);
        for (double& v : g.values) v += scene.noise_sigma * noise.next();
    }
    return g;
}

/// Sidecar ground-truth file: one line per shape with its parameters.
inline void write_scene_truth(const std::string& path, const SceneSpec& scene) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    for (const ShapeSpec& s : scene.shapes) {
        switch (s.kind) {
            case ShapeSpec::Kind::point:
                out << "point " << format_g17(s.x) << " " << format_g17(s.y) << "\n";
                break;
            case ShapeSpec::Kind::line:
                out << "line " << format_g17(s.r) << " " << format_g17(s.phi) << "\n";
                break;
            case ShapeSpec::Kind::circle:
                out << "circle " << format_g17(s.x) << " " << format_g17(s.y) << " "
                    << format_g17(s.radius) << "\n";
                break;
            case ShapeSpec::Kind::square:
                out << "square " << format_g17(s.pose.x0) << " " << format_g17(s.pose.y0) << " "
                    << format_g17(s.pose.s) << " " << format_g17(s.pose.theta) << "\n";
                break;
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

/**
 * Rasterizes the canonical filled square [-1, 1]^2 onto its own template
 * grid (side `extent` half-width, `size` samples per side). Useful as the
 * template image for pose sweeps against scenes drawn with square shapes.
 */
inline ScalarGrid make_square_template(int size = 33, double extent = 2.0) {
    if (size < 3 || !(extent > 1.0)) throw BadGeometry("square template needs size >= 3 and extent > 1");
    const double spacing = 2.0 * extent / (size - 1);
    ScalarGrid t(size, size, -extent, -extent, spacing);
    for (int iy = 0; iy < size; ++iy)
        for (int ix = 0; ix < size; ++ix)
            if (std::abs(t.x_at(ix)) <= 1.0 && std::abs(t.y_at(iy)) <= 1.0) t.at(ix, iy) = 1.0;
    return t;
}

} // namespace amphough
