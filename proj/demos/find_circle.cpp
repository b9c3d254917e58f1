// Minimal end-to-end usage: synthesize a noisy scene with a circle, sweep a
// circle template over a pose lattice, and print the detected center/radius.

#include <cstdio>
#include <numbers>

#include "amphough/filters.hpp"
#include "amphough/group.hpp"
#include "amphough/synth.hpp"

int main() {
    using namespace amphough;

    SceneSpec scene;
    scene.width = scene.height = 96;
    scene.origin_x = scene.origin_y = -47.5;
    scene.noise_sigma = 0.05;
    ShapeSpec circle;
    circle.kind = ShapeSpec::Kind::circle;
    circle.x = 11.0;
    circle.y = -7.0;
    circle.radius = 13.0;
    scene.shapes.push_back(circle);
    const ScalarGrid image = synth_scene(scene, 1);

    ParamLattice lattice;
    lattice.x0 = {-20.0, 20.0, 41};
    lattice.y0 = {-20.0, 20.0, 41};
    lattice.s = {8.0, 20.0, 10}; // template radius is 1, so s is the radius
    lattice.theta = {0.0, 2.0 * std::numbers::pi, 4};

    const AmplitudeAccumulator acc =
        extended_radon(image, make_circle_curve(1.0, 0.1), lattice);
    const auto peaks = detect_peaks(probability_map(acc), 0.5, {2, 2, 1, 1});

    if (peaks.empty()) {
        std::puts("no detection");
        return 1;
    }
    const Detection& d = peaks.front();
    std::printf("circle at (%.2f, %.2f), radius %.2f, probability %.3g%s\n", d.g.x0, d.g.y0,
                d.g.s, d.probability, d.theta_degenerate ? " (rotation-symmetric)" : "");
    return 0;
}
