#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amphough/detail/parallel.hpp"
#include "amphough/errors.hpp"
#include "amphough/grid.hpp"
#include "amphough/group.hpp"
#include "amphough/image_io.hpp"
#include "amphough/radon.hpp"

namespace amphough {

/**
 * Feature components of the Taylor-like expansion, indexed as in the
 * A_ij filter family: 0 = raw value, 1 = gradient magnitude,
 * 2 = gradient vector, 3 = Laplacian.
 */
enum class FeatureComponent { value = 0, grad_mag = 1, grad_vec = 2, laplacian = 3 };

enum class CombineMode { scalar_product, vector_dot, thresholded };

/**
 * One member of the filter family: which template component correlates
 * against which data component, and how. vector_dot pairs the gradient
 * vectors (the only two-channel component); thresholded binarizes both
 * scalar components at `threshold` before correlating (threshold-then-
 * correlate, the generalized-Hough style variant).
 */
struct FilterSpec {
    FeatureComponent template_component = FeatureComponent::value;
    FeatureComponent data_component = FeatureComponent::value;
    CombineMode combine = CombineMode::scalar_product;
    std::optional<double> threshold;
};

inline void validate_filter_spec(const FilterSpec& spec) {
    const bool t_vec = spec.template_component == FeatureComponent::grad_vec;
    const bool d_vec = spec.data_component == FeatureComponent::grad_vec;
    if (spec.combine == CombineMode::vector_dot) {
        if (!t_vec || !d_vec)
            throw IncompatibleComponents("vector_dot requires the gradient pair on both sides");
    } else if (t_vec || d_vec) {
        throw IncompatibleComponents("the gradient vector component is only usable with vector_dot");
    }
    if ((spec.combine == CombineMode::thresholded) != spec.threshold.has_value())
        throw IncompatibleComponents("threshold must be present exactly for the thresholded combine");
}

inline const ScalarGrid& feature_grid(const FeatureStack& s, FeatureComponent c) {
    switch (c) {
        case FeatureComponent::value: return s.base;
        case FeatureComponent::grad_mag: return s.grad_mag;
        case FeatureComponent::laplacian: return s.laplacian;
        default: throw IncompatibleComponents("gradient vector has no single scalar grid");
    }
}

namespace detail {

// Template samples with their integration weights, zeros dropped.
// Dropping exact zeros only removes terms that are identically zero, so
// sums match the dense evaluation bit for bit. The data-side grids are
// borrowed from the caller's stacks and must outlive the kernel, except
// the binarized grid of the thresholded combine, which the kernel owns.
struct FilterKernel {
    enum class Mode { scalar, vector, complex_template };
    struct ScalarEntry { double x, y, w; };
    struct VectorEntry { double x, y, wx, wy; };
    struct ComplexEntry { double x, y; std::complex<double> w; };
    Mode mode = Mode::scalar;
    std::vector<ScalarEntry> scalar;    // scalar_product / thresholded
    std::vector<VectorEntry> vec;       // vector_dot
    std::vector<ComplexEntry> cplx;     // complex template
    const ScalarGrid* data = nullptr;   // sampled data grid (scalar paths)
    const ScalarGrid* data_gx = nullptr;
    const ScalarGrid* data_gy = nullptr;
    ScalarGrid owned_data;              // binarized data grid when owned

    const ScalarGrid& sampled() const { return owned_data.values.empty() ? *data : owned_data; }
};

inline FilterKernel build_kernel(const FilterSpec& spec, const FeatureStack& t,
                                 const FeatureStack& f) {
    validate_filter_spec(spec);
    FilterKernel k;
    if (spec.combine == CombineMode::vector_dot) {
        k.mode = FilterKernel::Mode::vector;
        const double cell = t.grad_x.spacing * t.grad_x.spacing;
        for (int iy = 0; iy < t.grad_x.height; ++iy)
            for (int ix = 0; ix < t.grad_x.width; ++ix) {
                const double wx = t.grad_x.at(ix, iy) * cell;
                const double wy = t.grad_y.at(ix, iy) * cell;
                if (wx == 0.0 && wy == 0.0) continue;
                k.vec.push_back({t.grad_x.x_at(ix), t.grad_x.y_at(iy), wx, wy});
            }
        k.data_gx = &f.grad_x;
        k.data_gy = &f.grad_y;
        return k;
    }
    const ScalarGrid* tg = &feature_grid(t, spec.template_component);
    const ScalarGrid* fg = &feature_grid(f, spec.data_component);
    ScalarGrid t_bin;
    if (spec.combine == CombineMode::thresholded) {
        t_bin = threshold_binary(*tg, *spec.threshold);
        tg = &t_bin;
        k.owned_data = threshold_binary(*fg, *spec.threshold);
    } else {
        k.data = fg;
    }
    const double cell = tg->spacing * tg->spacing;
    for (int iy = 0; iy < tg->height; ++iy)
        for (int ix = 0; ix < tg->width; ++ix) {
            const double w = tg->at(ix, iy) * cell;
            if (w == 0.0) continue;
            k.scalar.push_back({tg->x_at(ix), tg->y_at(iy), w});
        }
    return k;
}

inline std::complex<double> eval_kernel(const FilterKernel& k, const GroupElement& g) {
    const double c = std::cos(g.theta);
    const double sn = std::sin(g.theta);
    auto map_x = [&](double x, double y) { return g.x0 + g.s * (x * c - y * sn); };
    auto map_y = [&](double x, double y) { return g.y0 + g.s * (x * sn + y * c); };
    switch (k.mode) {
        case FilterKernel::Mode::vector: {
            double acc = 0.0;
            for (const auto& e : k.vec)
                acc += e.wx * sample_bilinear(*k.data_gx, map_x(e.x, e.y), map_y(e.x, e.y)) +
                       e.wy * sample_bilinear(*k.data_gy, map_x(e.x, e.y), map_y(e.x, e.y));
            return {acc, 0.0};
        }
        case FilterKernel::Mode::complex_template: {
            std::complex<double> acc{0.0, 0.0};
            for (const auto& e : k.cplx)
                acc += e.w * sample_bilinear(k.sampled(), map_x(e.x, e.y), map_y(e.x, e.y));
            return acc;
        }
        case FilterKernel::Mode::scalar:
        default: {
            double acc = 0.0;
            const ScalarGrid& data = k.sampled();
            for (const auto& e : k.scalar)
                acc += e.w * sample_bilinear(data, map_x(e.x, e.y), map_y(e.x, e.y));
            return {acc, 0.0};
        }
    }
}

} // namespace detail

/**
 * Probability amplitude of one filter at one group element:
 *     A(T; g) = sum over the template grid of T_i(x, y) * F_j(g(x, y)) * spacing^2
 * (push-forward form; F is sampled bilinearly and reads zero outside its
 * grid). The |J|-weighted pull-back form is algebraically equal and is
 * exercised as a test oracle, not a runtime option.
 */
inline std::complex<double> evaluate_filter(const FilterSpec& spec, const FeatureStack& t,
                                            const FeatureStack& f, const GroupElement& g) {
    const detail::FilterKernel k = detail::build_kernel(spec, t, f);
    return detail::eval_kernel(k, g);
}

/// Complex-template variant: T is an explicit complex grid (a phase plate
/// or engineered filter) correlated against a scalar data component.
inline std::complex<double> evaluate_filter(const ComplexGrid& t, FeatureComponent data_component,
                                            const FeatureStack& f, const GroupElement& g) {
    if (data_component == FeatureComponent::grad_vec)
        throw IncompatibleComponents("complex templates pair with scalar data components");
    detail::FilterKernel k;
    k.mode = detail::FilterKernel::Mode::complex_template;
    k.data = &feature_grid(f, data_component);
    const double cell = t.spacing * t.spacing;
    for (int iy = 0; iy < t.height; ++iy)
        for (int ix = 0; ix < t.width; ++ix) {
            const std::complex<double> w = t.at(ix, iy) * cell;
            if (w.real() == 0.0 && w.imag() == 0.0) continue;
            k.cplx.push_back({t.x_at(ix), t.y_at(iy), w});
        }
    return detail::eval_kernel(k, g);
}

// Named members of the family. A00 generalizes plain cross-correlation to
// the full group; A11/A22/A33 correlate gradient magnitudes, gradient
// vectors and Laplacians respectively.

inline std::complex<double> a00(const ScalarGrid& t, const ScalarGrid& f, const GroupElement& g) {
    detail::FilterKernel k;
    k.data = &f;
    const double cell = t.spacing * t.spacing;
    for (int iy = 0; iy < t.height; ++iy)
        for (int ix = 0; ix < t.width; ++ix) {
            const double w = t.at(ix, iy) * cell;
            if (w == 0.0) continue;
            k.scalar.push_back({t.x_at(ix), t.y_at(iy), w});
        }
    return detail::eval_kernel(k, g);
}

inline FilterSpec preset_a11() {
    return {FeatureComponent::grad_mag, FeatureComponent::grad_mag, CombineMode::scalar_product, {}};
}
inline FilterSpec preset_a22() {
    return {FeatureComponent::grad_vec, FeatureComponent::grad_vec, CombineMode::vector_dot, {}};
}
inline FilterSpec preset_a33() {
    return {FeatureComponent::laplacian, FeatureComponent::laplacian, CombineMode::scalar_product, {}};
}

inline std::complex<double> a11(const FeatureStack& t, const FeatureStack& f, const GroupElement& g) {
    return evaluate_filter(preset_a11(), t, f, g);
}
inline std::complex<double> a22(const FeatureStack& t, const FeatureStack& f, const GroupElement& g) {
    return evaluate_filter(preset_a22(), t, f, g);
}
inline std::complex<double> a33(const FeatureStack& t, const FeatureStack& f, const GroupElement& g) {
    return evaluate_filter(preset_a33(), t, f, g);
}

/**
 * The Radon member of the family: a parameter-free step-edge template
 * whose gradient magnitude is a delta line along the v-axis, so the
 * filter reduces to the line integral of f along the g-image of that
 * axis. With scale pinned to unity and (x0, y0) = (r cos theta,
 * r sin theta) this reproduces the classical transform column for column.
 * Sampling follows the same midpoint rule as radon_transform but is
 * implemented independently through the group action.
 */
inline std::complex<double> a10_radon(const ScalarGrid& f, const GroupElement& g) {
    if (std::abs(g.s - 1.0) > 1e-12)
        throw ScaleNotUnity("a10_radon requires unit scale");
    const double c = std::cos(g.theta);
    const double sn = std::sin(g.theta);
    const double dx = -sn, dy = c; // image of the v-axis direction under g
    double span = 0.0;
    for (double cx : {f.origin_x, f.x_at(f.width - 1)})
        for (double cy : {f.origin_y, f.y_at(f.height - 1)})
            span = std::max(span, std::abs((cx - g.x0) * dx + (cy - g.y0) * dy));
    const double dt = f.spacing / 2.0;
    const long n = static_cast<long>(std::ceil(2.0 * span / dt));
    double acc = 0.0;
    for (long m = 0; m < n; ++m) {
        const double v = -span + (m + 0.5) * dt;
        const Vec2 p = group_apply(g, 0.0, v);
        acc += sample_bilinear(f, p.x, p.y);
    }
    return {acc * dt, 0.0};
}

// ---------------------------------------------------------------------------
// Lattice sweeps, superposition, probability maps
// ---------------------------------------------------------------------------

/**
 * Evaluates one filter at every cell of the lattice. Each cell holds
 * exactly evaluate_filter(spec, t, f, element_at(cell)); cells are
 * written once each, so output is identical for every thread count.
 */
inline AmplitudeAccumulator accumulate(const FilterSpec& spec, const FeatureStack& t,
                                       const FeatureStack& f, const ParamLattice& lattice,
                                       int threads = 0) {
    validate_lattice(lattice);
    const detail::FilterKernel k = detail::build_kernel(spec, t, f);
    AmplitudeAccumulator acc;
    acc.lattice = lattice;
    acc.cells.assign(lattice.cell_count(), {0.0, 0.0});
    detail::parallel_for(acc.cells.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t flat = begin; flat < end; ++flat)
            acc.cells[flat] = detail::eval_kernel(k, lattice.element_at(flat));
    });
    return acc;
}

/// Plain-value sweep of a raw template grid (the A00 member over a lattice).
inline AmplitudeAccumulator accumulate_a00(const ScalarGrid& t, const ScalarGrid& f,
                                           const ParamLattice& lattice, int threads = 0) {
    validate_lattice(lattice);
    detail::FilterKernel k;
    k.data = &f;
    const double cell = t.spacing * t.spacing;
    for (int iy = 0; iy < t.height; ++iy)
        for (int ix = 0; ix < t.width; ++ix) {
            const double w = t.at(ix, iy) * cell;
            if (w == 0.0) continue;
            k.scalar.push_back({t.x_at(ix), t.y_at(iy), w});
        }
    AmplitudeAccumulator acc;
    acc.lattice = lattice;
    acc.cells.assign(lattice.cell_count(), {0.0, 0.0});
    detail::parallel_for(acc.cells.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t flat = begin; flat < end; ++flat)
            acc.cells[flat] = detail::eval_kernel(k, lattice.element_at(flat));
    });
    return acc;
}

/// Weights {c_k} of the evidence superposition A = sum_k c_k A_k; each
/// term names the accumulator it scales.
struct CoefficientSet {
    std::vector<std::pair<std::size_t, std::complex<double>>> terms;
};

/// Cell-wise complex superposition sum_k c_k A_k over one shared lattice.
inline AmplitudeAccumulator superpose_accumulators(const CoefficientSet& coeffs,
                                                   std::span<const AmplitudeAccumulator> accs) {
    if (coeffs.terms.empty()) throw Error("coefficient set is empty");
    bool any_nonzero = false;
    for (const auto& [id, c] : coeffs.terms) {
        if (id >= accs.size()) throw Error("coefficient refers to a missing accumulator");
        if (c != std::complex<double>{0.0, 0.0}) any_nonzero = true;
    }
    if (!any_nonzero) throw Error("coefficient set needs at least one nonzero coefficient");
    const ParamLattice& lattice = accs[coeffs.terms.front().first].lattice;
    for (const auto& [id, c] : coeffs.terms)
        if (!same_lattice(lattice, accs[id].lattice))
            throw LatticeMismatch("superposed accumulators must share one lattice");
    AmplitudeAccumulator out;
    out.lattice = lattice;
    out.cells.assign(lattice.cell_count(), {0.0, 0.0});
    for (const auto& [id, c] : coeffs.terms)
        for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i] += c * accs[id].cells[i];
    return out;
}

/// Cell-wise |A|^2: the measurable detection probability field.
struct ProbabilityMap {
    ParamLattice lattice;
    std::vector<double> values;
};

inline ProbabilityMap probability_map(const AmplitudeAccumulator& acc) {
    ProbabilityMap map;
    map.lattice = acc.lattice;
    map.values.resize(acc.cells.size());
    for (std::size_t i = 0; i < acc.cells.size(); ++i) map.values[i] = std::norm(acc.cells[i]);
    return map;
}

// ---------------------------------------------------------------------------
// Peak detection
// ---------------------------------------------------------------------------

struct Detection {
    GroupElement g;
    double probability = 0.0;
    std::array<int, 4> bin{};
    bool theta_degenerate = false;
};

namespace detail {

inline int axis_count(const ParamLattice& l, int axis) {
    switch (axis) {
        case 0: return l.x0.count;
        case 1: return l.y0.count;
        case 2: return l.s.count;
        default: return l.theta.count;
    }
}

inline int theta_distance(const ParamLattice& l, int a, int b) {
    int d = std::abs(a - b);
    if (l.theta_wraps && l.theta.count > 1) d = std::min(d, l.theta.count - d);
    return d;
}

// Relative theta-marginal variance at a spatial cell; a rotation-symmetric
// template leaves only rounding noise along the theta axis.
inline bool theta_degenerate_at(const ProbabilityMap& map, int ix, int iy, int is, double cell) {
    const int nt = map.lattice.theta.count;
    if (nt < 2 || cell <= 0.0) return false;
    double mean = 0.0;
    for (int it = 0; it < nt; ++it) mean += map.values[map.lattice.index(ix, iy, is, it)];
    mean /= nt;
    double var = 0.0;
    for (int it = 0; it < nt; ++it) {
        const double d = map.values[map.lattice.index(ix, iy, is, it)] - mean;
        var += d * d;
    }
    var /= nt;
    return var <= 1e-9 * cell * cell;
}

} // namespace detail

/**
 * Local maxima of the probability field at or above min_fraction of the
 * global maximum, thinned by greedy non-maximum suppression over the
 * per-axis index radii (descending value, ties broken by lowest row-major
 * index). The theta axis wraps when the lattice marks it cyclic, and a
 * detection whose theta axis is degenerate (rotation-symmetric template)
 * is reported at the first theta bin and suppresses its whole theta
 * column. An all-zero map yields no detections.
 */
inline std::vector<Detection> detect_peaks(const ProbabilityMap& map, double min_fraction,
                                           std::array<int, 4> suppression_radius) {
    if (map.values.empty()) throw EmptyMap("probability map has no cells");
    if (!(min_fraction > 0.0) || !(min_fraction <= 1.0))
        throw Error("min_fraction must lie in (0, 1]");
    const ParamLattice& lat = map.lattice;
    const double gmax = *std::max_element(map.values.begin(), map.values.end());
    if (gmax <= 0.0) return {};
    const double floor_value = min_fraction * gmax;

    const std::array<int, 4> counts{lat.x0.count, lat.y0.count, lat.s.count, lat.theta.count};
    std::vector<std::size_t> candidates;
    for (std::size_t flat = 0; flat < map.values.size(); ++flat) {
        const double v = map.values[flat];
        if (v < floor_value) continue;
        const auto idx = lat.unravel(flat);
        bool is_max = true;
        for (int d0 = -1; d0 <= 1 && is_max; ++d0)
            for (int d1 = -1; d1 <= 1 && is_max; ++d1)
                for (int d2 = -1; d2 <= 1 && is_max; ++d2)
                    for (int d3 = -1; d3 <= 1 && is_max; ++d3) {
                        if (d0 == 0 && d1 == 0 && d2 == 0 && d3 == 0) continue;
                        int i0 = idx[0] + d0, i1 = idx[1] + d1, i2 = idx[2] + d2, i3 = idx[3] + d3;
                        if (i0 < 0 || i0 >= counts[0] || i1 < 0 || i1 >= counts[1] || i2 < 0 ||
                            i2 >= counts[2])
                            continue;
                        if (lat.theta_wraps && counts[3] > 1)
                            i3 = (i3 + counts[3]) % counts[3];
                        else if (i3 < 0 || i3 >= counts[3])
                            continue;
                        if (map.values[lat.index(i0, i1, i2, i3)] > v) is_max = false;
                    }
        if (is_max) candidates.push_back(flat);
    }
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        if (map.values[a] != map.values[b]) return map.values[a] > map.values[b];
        return a < b;
    });

    std::vector<Detection> out;
    for (std::size_t flat : candidates) {
        auto idx = lat.unravel(flat);
        const double value = map.values[flat];
        const bool degenerate = detail::theta_degenerate_at(map, idx[0], idx[1], idx[2], value);
        if (degenerate) idx[3] = 0;
        bool suppressed = false;
        for (const Detection& d : out) {
            const bool theta_close = d.theta_degenerate || degenerate ||
                                     detail::theta_distance(lat, d.bin[3], idx[3]) <= suppression_radius[3];
            if (std::abs(d.bin[0] - idx[0]) <= suppression_radius[0] &&
                std::abs(d.bin[1] - idx[1]) <= suppression_radius[1] &&
                std::abs(d.bin[2] - idx[2]) <= suppression_radius[2] && theta_close) {
                suppressed = true;
                break;
            }
        }
        if (suppressed) continue;
        Detection d;
        d.bin = idx;
        d.g = lat.element_at(idx[0], idx[1], idx[2], idx[3]);
        d.probability = map.values[lat.index(idx[0], idx[1], idx[2], idx[3])];
        d.theta_degenerate = degenerate;
        out.push_back(d);
    }
    return out;
}

/// Detection report: one line per detection, `x0 y0 s theta probability` in %.17g.
inline std::string detection_report(std::span<const Detection> dets) {
    std::string out;
    for (const Detection& d : dets) {
        out += format_g17(d.g.x0);
        out += ' ';
        out += format_g17(d.g.y0);
        out += ' ';
        out += format_g17(d.g.s);
        out += ' ';
        out += format_g17(d.g.theta);
        out += ' ';
        out += format_g17(d.probability);
        out += '\n';
    }
    return out;
}

inline void write_detection_report(const std::string& path, std::span<const Detection> dets) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << detection_report(dets);
    if (!out) throw IoError("write failed: " + path);
}

/// Parses a detection report back into (pose, probability) rows.
inline std::vector<Detection> read_detection_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detection report: " + path);
    std::vector<Detection> out;
    double x0, y0, s, theta, p;
    while (in >> x0 >> y0 >> s >> theta >> p) {
        Detection d;
        d.g = GroupElement(x0, y0, s, theta);
        d.probability = p;
        out.push_back(d);
    }
    return out;
}

} // namespace amphough
