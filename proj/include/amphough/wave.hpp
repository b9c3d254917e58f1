#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include "amphough/errors.hpp"
#include "amphough/grid.hpp"

namespace amphough {

/// Complex probability amplitude; its squared magnitude is a probability density.
using Amplitude = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/**
 * Monochromatic plane wave a * exp(2*pi*i*(omega*t - k.x)) with an optional
 * constant extra phase. kx, ky are spatial frequencies in cycles per unit
 * length; omega is the temporal frequency in cycles per unit time.
 */
struct PlaneWave {
    double a = 1.0;
    double omega = 0.0;
    double kx = 0.0;
    double ky = 0.0;
    double phase0 = 0.0;
};

/// Evaluates the wave's complex amplitude at time t and position (x, y).
inline Amplitude plane_wave_at(const PlaneWave& w, double t, double x, double y) {
    const double phase = two_pi * (w.omega * t - (w.kx * x + w.ky * y)) + w.phase0;
    return {w.a * std::cos(phase), w.a * std::sin(phase)};
}

/// Measured intensity |A|^2 of an amplitude.
inline double intensity(const Amplitude& a) { return std::norm(a); }

/**
 * Joint intensity of two waves a1*exp(-i*phi1) and a2*exp(-i*phi2) by the
 * closed-form interference law
 *     I1 + I2 + 2*sqrt(I1*I2)*cos(phi2 - phi1),
 * which equals |A1 + A2|^2. Opposite phases with equal amplitudes cancel.
 */
inline double two_wave_intensity(double a1, double phi1, double a2, double phi2) {
    if (a1 < 0.0 || a2 < 0.0)
        throw NegativeAmplitude("two_wave_intensity requires non-negative amplitudes");
    const double i1 = a1 * a1;
    const double i2 = a2 * a2;
    return i1 + i2 + 2.0 * std::sqrt(i1 * i2) * std::cos(phi2 - phi1);
}

/// Component-wise complex sum of amplitudes (the superposition principle).
inline Amplitude superpose(std::span<const Amplitude> amps) {
    if (amps.empty()) throw EmptyInput("superpose requires at least one amplitude");
    Amplitude sum{0.0, 0.0};
    for (const Amplitude& a : amps) sum += a;
    return sum;
}

/// Sum of individual intensities, the incoherent (random relative phase) limit.
inline double incoherent_intensity(std::span<const Amplitude> amps) {
    double sum = 0.0;
    for (const Amplitude& a : amps) sum += std::norm(a);
    return sum;
}

/**
 * Far-field (Fraunhofer) amplitude of an aperture t illuminated by a unit
 * monochromatic plane wave: a midpoint Riemann sum of
 *     integral dx dy t(x, y) exp(-2*pi*i*k*(alpha*x + beta*y))
 * over the grid's physical extent, each sample weighted by spacing^2.
 * (alpha, beta) are direction cosines of the observation point and k > 0
 * is the wavenumber in cycles per unit length. The overall proportionality
 * constant of the physical transform is fixed by the cell-area weight only.
 */
inline Amplitude fraunhofer_ft(const ScalarGrid& t, double alpha, double beta, double k) {
    Amplitude acc{0.0, 0.0};
    for (int iy = 0; iy < t.height; ++iy) {
        const double y = t.y_at(iy);
        for (int ix = 0; ix < t.width; ++ix) {
            const double v = t.at(ix, iy);
            if (v == 0.0) continue;
            const double phase = -two_pi * k * (alpha * t.x_at(ix) + beta * y);
            acc += Amplitude{v * std::cos(phase), v * std::sin(phase)};
        }
    }
    return acc * (t.spacing * t.spacing);
}

/**
 * Closed-form far-field pattern of a transparent square of side a centered
 * on the axis: the product sin(pi*a*u)/(pi*u) * sin(pi*a*v)/(pi*v), with
 * the u -> 0 limit equal to a (so the on-axis value is a^2). u and v are
 * the products k*alpha and k*beta.
 */
inline double square_aperture_analytic(double a, double u, double v) {
    if (!(a > 0.0)) throw BadGeometry("square aperture side must be positive");
    auto line = [a](double w) {
        if (std::abs(std::numbers::pi * a * w) < 1e-12) return a;
        return std::sin(std::numbers::pi * a * w) / (std::numbers::pi * w);
    };
    return line(u) * line(v);
}

} // namespace amphough
