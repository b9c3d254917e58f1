#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "amphough/errors.hpp"
#include "amphough/grid.hpp"

namespace amphough {

/// Locale-independent "%.17g" rendering used by every text format.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

// Skips whitespace and '#' comment lines inside a PNM header.
inline int pnm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok.empty() ? EOF : 0;
}

inline long pnm_int_token(std::istream& in, const std::string& path) {
    std::string tok;
    if (pnm_next_token(in, tok) == EOF) throw IoError("truncated PGM header: " + path);
    try {
        std::size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad integer '" + tok + "' in PGM header: " + path);
    }
}

} // namespace detail

/**
 * Reads an ASCII (P2) or binary (P5) PGM file. Gray levels are mapped to
 * [0, 1] by dividing by maxval; the frame defaults to origin (0,0) and
 * spacing 1. Maxval up to 65535 is supported (two-byte big-endian samples
 * in P5, per the netpbm convention).
 */
inline ScalarGrid read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PGM file: " + path);
    std::string magic;
    if (detail::pnm_next_token(in, magic) == EOF || (magic != "P2" && magic != "P5"))
        throw IoError("not a P2/P5 PGM file: " + path);
    const long w = detail::pnm_int_token(in, path);
    const long h = detail::pnm_int_token(in, path);
    const long maxval = detail::pnm_int_token(in, path);
    if (w <= 0 || h <= 0) throw IoError("non-positive PGM dimensions: " + path);
    if (maxval <= 0 || maxval > 65535) throw IoError("PGM maxval out of range: " + path);

    ScalarGrid g(static_cast<int>(w), static_cast<int>(h));
    const double scale = 1.0 / static_cast<double>(maxval);
    if (magic == "P2") {
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            const long v = detail::pnm_int_token(in, path);
            if (v < 0 || v > maxval) throw IoError("PGM sample out of range: " + path);
            g.values[i] = v * scale;
        }
    } else {
        // the tokenizer consumed the single whitespace byte after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(g.values.size() * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size()))
            throw IoError("truncated PGM raster: " + path);
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            long v = bytes == 2 ? (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
            if (v > maxval) throw IoError("PGM sample out of range: " + path);
            g.values[i] = v * scale;
        }
    }
    return g;
}

struct PgmOptions {
    bool binary = true; // P5 when true, P2 when false
    int maxval = 65535;
};

/**
 * Writes a grid as PGM, clamping values to [0, 1] and quantizing to
 * maxval levels (the only lossy step of the format).
 */
inline void write_pgm(const std::string& path, const ScalarGrid& g, PgmOptions opt = {}) {
    if (opt.maxval <= 0 || opt.maxval > 65535) throw IoError("PGM maxval out of range");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << (opt.binary ? "P5" : "P2") << "\n" << g.width << " " << g.height << "\n" << opt.maxval << "\n";
    auto quantize = [&](double v) -> long {
        if (!(v > 0.0)) return 0;
        if (v >= 1.0) return opt.maxval;
        return std::lround(v * opt.maxval);
    };
    if (opt.binary) {
        std::vector<unsigned char> raw;
        raw.reserve(g.values.size() * (opt.maxval > 255 ? 2 : 1));
        for (double v : g.values) {
            const long q = quantize(v);
            if (opt.maxval > 255) raw.push_back(static_cast<unsigned char>((q >> 8) & 0xff));
            raw.push_back(static_cast<unsigned char>(q & 0xff));
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    } else {
        for (int iy = 0; iy < g.height; ++iy) {
            for (int ix = 0; ix < g.width; ++ix)
                out << quantize(g.at(ix, iy)) << (ix + 1 == g.width ? "" : " ");
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

/**
 * Affinely rescales an arbitrary real grid to [0, 1] and writes it as a
 * PGM heatmap. The applied (min, max) is recorded in a sidecar text file
 * "<path>.scale.txt" so the rescaling loses no information beyond the
 * PGM quantization. A constant grid maps to all zeros.
 */
inline void write_pgm_heatmap(const std::string& path, const ScalarGrid& g, PgmOptions opt = {}) {
    double lo = g.values.empty() ? 0.0 : g.values[0];
    double hi = lo;
    for (double v : g.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ScalarGrid scaled(g.width, g.height, g.origin_x, g.origin_y, g.spacing);
    const double span = hi - lo;
    if (span > 0.0)
        for (std::size_t i = 0; i < g.values.size(); ++i)
            scaled.values[i] = (g.values[i] - lo) / span;
    write_pgm(path, scaled, opt);
    std::ofstream side(path + ".scale.txt");
    if (!side) throw IoError("cannot write sidecar: " + path + ".scale.txt");
    side << "min " << format_g17(lo) << "\n" << "max " << format_g17(hi) << "\n";
}

/// Reads the (min, max) sidecar written by write_pgm_heatmap.
inline std::pair<double, double> read_heatmap_scale(const std::string& pgm_path) {
    std::ifstream in(pgm_path + ".scale.txt");
    if (!in) throw IoError("cannot open sidecar: " + pgm_path + ".scale.txt");
    std::string k1, k2;
    double lo = 0.0, hi = 0.0;
    if (!(in >> k1 >> lo >> k2 >> hi) || k1 != "min" || k2 != "max")
        throw IoError("malformed sidecar: " + pgm_path + ".scale.txt");
    return {lo, hi};
}

/**
 * Grid dump as CSV, one row per scanline. A leading comment line carries
 * the frame fields so the dump round-trips without loss:
 *   # amphough-grid width height origin_x origin_y spacing
 */
inline void write_grid_csv(const std::string& path, const ScalarGrid& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "# amphough-grid " << g.width << " " << g.height << " " << format_g17(g.origin_x)
        << " " << format_g17(g.origin_y) << " " << format_g17(g.spacing) << "\n";
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix)
            out << format_g17(g.at(ix, iy)) << (ix + 1 == g.width ? "" : ",");
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

inline ScalarGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    std::string line;
    std::vector<std::vector<double>> rows;
    int w = -1, h = -1;
    double ox = 0.0, oy = 0.0, sp = 1.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tag;
            if (hs >> tag && tag == "amphough-grid") hs >> w >> h >> ox >> oy >> sp;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw IoError("bad CSV number '" + field + "' in " + path);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("ragged CSV rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty CSV grid: " + path);
    ScalarGrid g(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), ox, oy,
                 sp > 0.0 ? sp : 1.0);
    if (w > 0 && (w != g.width || h != g.height)) throw IoError("CSV header/shape mismatch: " + path);
    for (int iy = 0; iy < g.height; ++iy)
        for (int ix = 0; ix < g.width; ++ix) g.at(ix, iy) = rows[iy][ix];
    return g;
}

} // namespace amphough
