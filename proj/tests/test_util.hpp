#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "amphough/grid.hpp"

namespace testutil {

// Deterministic uniform doubles straight from mt19937_64 bits, so test
// data does not depend on the standard library's distribution code.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) {
        const double u = double(rng_() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }
    std::uint64_t bits() { return rng_(); }

  private:
    std::mt19937_64 rng_;
};

inline amphough::ScalarGrid random_grid(int w, int h, std::uint64_t seed, double lo = -1.0,
                                        double hi = 1.0) {
    amphough::ScalarGrid g(w, h);
    Rng rng(seed);
    for (double& v : g.values) v = rng.uniform(lo, hi);
    return g;
}

/// Grid sampled from f(x, y) over the physical frame.
template <typename F>
amphough::ScalarGrid grid_from(int w, int h, double ox, double oy, double spacing, F&& f) {
    amphough::ScalarGrid g(w, h, ox, oy, spacing);
    for (int iy = 0; iy < h; ++iy)
        for (int ix = 0; ix < w; ++ix) g.at(ix, iy) = f(g.x_at(ix), g.y_at(iy));
    return g;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

inline std::string temp_path(const std::string& name) {
    return "test_tmp_" + name;
}

} // namespace testutil
