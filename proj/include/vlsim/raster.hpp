#pragma once

// GRASS-compatible ASCII raster grids: 6-line header (north/south/east/
// west/rows/cols), then rows×cols whitespace-separated values, "*" for
// null. Format details in docs/formats.md.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vlsim {

struct AsciiRaster {
    double north = 0.0;
    double south = 0.0;
    double east = 0.0;
    double west = 0.0;
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    std::vector<double> values;        // row-major, northernmost row first
    std::vector<std::uint8_t> nulls;   // 1 = null cell

    std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    std::size_t idx(std::int32_t r, std::int32_t c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
    }
    double at(std::int32_t r, std::int32_t c) const { return values[idx(r, c)]; }
    void set(std::int32_t r, std::int32_t c, double v) {
        values[idx(r, c)] = v;
        nulls[idx(r, c)] = 0;
    }
    bool is_null(std::int32_t r, std::int32_t c) const { return nulls[idx(r, c)] != 0; }
    void set_null(std::int32_t r, std::int32_t c) {
        values[idx(r, c)] = 0.0;
        nulls[idx(r, c)] = 1;
    }

    // Cell edge length; throws if cells are not square.
    double side() const;
};

// Zero-filled raster with origin (0,0) and square cells of the given side.
AsciiRaster make_raster(std::int32_t rows, std::int32_t cols, double side);

// Throws std::runtime_error naming the file and the defect (missing file,
// malformed header, wrong cell count, non-numeric token).
AsciiRaster read_raster(const std::filesystem::path& path);

void write_raster(const AsciiRaster& r, const std::filesystem::path& path);

// Canonical cell-value formatting: 6 significant digits.
std::string format_raster_value(double v);

}  // namespace vlsim
