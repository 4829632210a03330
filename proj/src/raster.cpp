#include "vlsim/raster.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vlsim {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
    throw std::runtime_error("raster " + path.string() + ": " + why);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail(path, "non-numeric token '" + tok + "'");
    return v;
}

std::string format_coord(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

}  // namespace

double AsciiRaster::side() const {
    if (rows <= 0 || cols <= 0) throw std::runtime_error("raster: empty geometry");
    const double sx = (east - west) / cols;
    const double sy = (north - south) / rows;
    if (!(sx > 0.0) || std::fabs(sx - sy) > 1e-6 * sx)
        throw std::runtime_error("raster: cells are not square");
    return sx;
}

AsciiRaster make_raster(std::int32_t rows, std::int32_t cols, double side) {
    AsciiRaster r;
    r.rows = rows;
    r.cols = cols;
    r.west = 0.0;
    r.south = 0.0;
    r.east = cols * side;
    r.north = rows * side;
    r.values.assign(r.size(), 0.0);
    r.nulls.assign(r.size(), 0);
    return r;
}

AsciiRaster read_raster(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open");

    AsciiRaster r;
    bool seen[6] = {};
    std::string line;
    for (int i = 0; i < 6; ++i) {
        if (!std::getline(in, line)) fail(path, "truncated header");
        const auto colon = line.find(':');
        if (colon == std::string::npos) fail(path, "malformed header line '" + trim(line) + "'");
        const std::string key = trim(line.substr(0, colon));
        const std::string val = trim(line.substr(colon + 1));
        int slot;
        if (key == "north") slot = 0;
        else if (key == "south") slot = 1;
        else if (key == "east") slot = 2;
        else if (key == "west") slot = 3;
        else if (key == "rows") slot = 4;
        else if (key == "cols") slot = 5;
        else { fail(path, "unknown header key '" + key + "'"); }
        if (seen[slot]) fail(path, "duplicate header key '" + key + "'");
        seen[slot] = true;
        if (slot == 4 || slot == 5) {
            const double n = parse_number(val, path);
            if (n <= 0 || n != std::floor(n)) fail(path, key + " must be a positive integer");
            (slot == 4 ? r.rows : r.cols) = static_cast<std::int32_t>(n);
        } else {
            const double v = parse_number(val, path);
            (slot == 0 ? r.north : slot == 1 ? r.south : slot == 2 ? r.east : r.west) = v;
        }
    }

    r.values.assign(r.size(), 0.0);
    r.nulls.assign(r.size(), 0);
    std::string tok;
    std::size_t i = 0;
    while (in >> tok) {
        if (i >= r.size()) fail(path, "more cells than rows*cols");
        if (tok == "*")
            r.nulls[i] = 1;
        else
            r.values[i] = parse_number(tok, path);
        ++i;
    }
    if (i != r.size()) fail(path, "fewer cells than rows*cols");
    return r;
}

void write_raster(const AsciiRaster& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail(path, "cannot open for writing");
    out << "north: " << format_coord(r.north) << "\n"
        << "south: " << format_coord(r.south) << "\n"
        << "east: " << format_coord(r.east) << "\n"
        << "west: " << format_coord(r.west) << "\n"
        << "rows: " << r.rows << "\n"
        << "cols: " << r.cols << "\n";
    for (std::int32_t row = 0; row < r.rows; ++row) {
        for (std::int32_t col = 0; col < r.cols; ++col) {
            if (col > 0) out << ' ';
            const auto i = r.idx(row, col);
            if (r.nulls[i])
                out << '*';
            else
                out << format_raster_value(r.values[i]);
        }
        out << '\n';
    }
    if (!out) fail(path, "write failed");
}

std::string format_raster_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace vlsim
