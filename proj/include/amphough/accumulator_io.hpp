#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include "amphough/errors.hpp"
#include "amphough/group.hpp"
#include "amphough/image_io.hpp"

namespace amphough {

namespace detail {

inline void put_bytes(std::ofstream& out, std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint64_t get_bytes(std::ifstream& in, int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
        const int c = in.get();
        if (c == EOF) throw IoError("truncated accumulator file");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}
inline void put_f64le(std::ofstream& out, double v) { put_bytes(out, std::bit_cast<std::uint64_t>(v), 8); }
inline double get_f64le(std::ifstream& in) { return std::bit_cast<double>(get_bytes(in, 8)); }

} // namespace detail

inline constexpr std::uint16_t amph_format_version = 1;

/**
 * AMPH binary accumulator format (all fields little-endian):
 *   magic "AMPH", version u16, then four axis descriptors in lattice
 *   order (min f64, max f64, count u32), then count-product complex
 *   cells as (re, im) f64 pairs, row-major in (x0, y0, s, theta).
 * The lattice's spacing-mode flags are not part of the format; readers
 * get the default geometric-s / wrapping-theta conventions.
 */
inline void write_accumulator(const std::string& path, const AmplitudeAccumulator& acc) {
    if (acc.cells.size() != acc.lattice.cell_count())
        throw Error("accumulator cell count does not match its lattice");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write("AMPH", 4);
    detail::put_bytes(out, amph_format_version, 2);
    for (const AxisSpec* a : {&acc.lattice.x0, &acc.lattice.y0, &acc.lattice.s, &acc.lattice.theta}) {
        detail::put_f64le(out, a->min);
        detail::put_f64le(out, a->max);
        detail::put_bytes(out, static_cast<std::uint64_t>(a->count), 4);
    }
    for (const auto& cell : acc.cells) {
        detail::put_f64le(out, cell.real());
        detail::put_f64le(out, cell.imag());
    }
    if (!out) throw IoError("write failed: " + path);
}

inline AmplitudeAccumulator read_accumulator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open accumulator file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != "AMPH")
        throw IoError("not an AMPH accumulator file: " + path);
    const auto version = static_cast<std::uint16_t>(detail::get_bytes(in, 2));
    if (version != amph_format_version)
        throw IoError("unsupported AMPH version in " + path);
    AmplitudeAccumulator acc;
    for (AxisSpec* a : {&acc.lattice.x0, &acc.lattice.y0, &acc.lattice.s, &acc.lattice.theta}) {
        a->min = detail::get_f64le(in);
        a->max = detail::get_f64le(in);
        a->count = static_cast<int>(detail::get_bytes(in, 4));
    }
    validate_lattice(acc.lattice);
    acc.cells.resize(acc.lattice.cell_count());
    for (auto& cell : acc.cells) {
        const double re = detail::get_f64le(in);
        const double im = detail::get_f64le(in);
        cell = {re, im};
    }
    return acc;
}

inline constexpr std::array<const char*, 4> lattice_axis_names{"x0", "y0", "s", "theta"};

inline double lattice_axis_value(const ParamLattice& l, int axis, int i) {
    switch (axis) {
        case 0: return l.x0_at(i);
        case 1: return l.y0_at(i);
        case 2: return l.s_at(i);
        default: return l.theta_at(i);
    }
}

inline int lattice_axis_count(const ParamLattice& l, int axis) {
    switch (axis) {
        case 0: return l.x0.count;
        case 1: return l.y0.count;
        case 2: return l.s.count;
        default: return l.theta.count;
    }
}

/**
 * CSV view of a 2-D slice of the accumulator: row_axis varies down the
 * rows, col_axis across the columns, and the remaining two axes are
 * pinned at the indices given in `fixed` (entries for the free axes are
 * ignored). Cells are written as interleaved re,im field pairs; a leading
 * comment line records the layout.
 */
inline void write_accumulator_slice_csv(const std::string& path, const AmplitudeAccumulator& acc,
                                        int row_axis, int col_axis, std::array<int, 4> fixed) {
    if (row_axis < 0 || row_axis > 3 || col_axis < 0 || col_axis > 3 || row_axis == col_axis)
        throw Error("slice axes must be two distinct indices in 0..3");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "# amphough-slice rows=" << lattice_axis_names[row_axis]
        << " cols=" << lattice_axis_names[col_axis];
    for (int axis = 0; axis < 4; ++axis) {
        if (axis == row_axis || axis == col_axis) continue;
        if (fixed[axis] < 0 || fixed[axis] >= lattice_axis_count(acc.lattice, axis))
            throw Error("slice fixed index out of range");
        out << " " << lattice_axis_names[axis] << "="
            << format_g17(lattice_axis_value(acc.lattice, axis, fixed[axis]));
    }
    out << " cells=re,im\n";
    const int n_row = lattice_axis_count(acc.lattice, row_axis);
    const int n_col = lattice_axis_count(acc.lattice, col_axis);
    for (int r = 0; r < n_row; ++r) {
        for (int c = 0; c < n_col; ++c) {
            std::array<int, 4> idx = fixed;
            idx[row_axis] = r;
            idx[col_axis] = c;
            const auto cell = acc.cells[acc.lattice.index(idx[0], idx[1], idx[2], idx[3])];
            out << format_g17(cell.real()) << "," << format_g17(cell.imag());
            out << (c + 1 == n_col ? "" : ",");
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace amphough
