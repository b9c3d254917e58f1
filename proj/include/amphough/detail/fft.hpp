#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace amphough::detail {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 transform; sign -1 forward, +1 inverse kernel.
/// No normalization on either direction.
inline void fft_radix2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<cplx> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
        twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * double(k) / double(n));
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx w = twiddle[k * stride];
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

/// O(n^2) fallback for lengths that are not a power of two.
inline void dft_naive(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n);
    for (std::size_t u = 0; u < n; ++u) {
        cplx acc{0.0, 0.0};
        for (std::size_t x = 0; x < n; ++x)
            acc += a[x] * std::polar(1.0, sign * 2.0 * std::numbers::pi * double(u * x % n) / double(n));
        out[u] = acc;
    }
    a = std::move(out);
}

inline void transform_1d(std::vector<cplx>& a, int sign) {
    if (a.size() < 2) return;
    if (is_pow2(a.size()))
        fft_radix2(a, sign);
    else
        dft_naive(a, sign);
}

/// Unnormalized 2-D transform of a row-major W x H buffer (rows first, then columns).
inline void transform_2d(std::vector<cplx>& data, std::size_t w, std::size_t h, int sign) {
    std::vector<cplx> line;
    line.resize(w);
    for (std::size_t iy = 0; iy < h; ++iy) {
        for (std::size_t ix = 0; ix < w; ++ix) line[ix] = data[iy * w + ix];
        transform_1d(line, sign);
        for (std::size_t ix = 0; ix < w; ++ix) data[iy * w + ix] = line[ix];
    }
    line.resize(h);
    for (std::size_t ix = 0; ix < w; ++ix) {
        for (std::size_t iy = 0; iy < h; ++iy) line[iy] = data[iy * w + ix];
        transform_1d(line, sign);
        for (std::size_t iy = 0; iy < h; ++iy) data[iy * w + ix] = line[iy];
    }
}

} // namespace amphough::detail
