#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "vlsim/domain.hpp"

namespace vlsim {

enum class EngineKind : std::uint8_t { fine, coarse, both };
enum class FireMode : std::uint8_t { none, regime, maps };

const char* engine_kind_name(EngineKind e);
const char* fire_mode_name(FireMode f);

struct RunConfig {
    std::int32_t rows = 2;
    std::int32_t cols = 2;
    double cell_area = 100.0;  // m²
    std::int64_t m = 100;      // max plants per species per cell
    double initial_avg = 40.0; // mean initial plants per cell, all species
    std::int32_t years = 200;
    std::uint64_t seed = 1;
    EngineKind engine = EngineKind::both;
    int threads = 1;
    FireMode fire_mode = FireMode::none;
    std::filesystem::path fire_dir;      // maps mode: fire_<year>.asc per burning year
    std::filesystem::path terrain_path;  // empty → synthetic terrain
    std::int32_t null_cells = 0;         // synthetic terrain: nulls at the grid tail
    std::int32_t uniform_terrain = -1;   // synthetic: -1 banded, 0/1/2 all one type
    std::int32_t map_stride = 1;         // raster output every k years (0: first/last only)
    std::filesystem::path out_dir;

    void validate() const;  // throws std::invalid_argument
};

// Named configurations: "single-cell" (2×2, 3 nulls, no fire), "5k"
// (50×100), "20k" (100×200, 25 m² cells), plus desk-scale "200" (10×20,
// fires on) and "bench-500" (20×25, no fire) for comparisons and scaling
// measurements. All run 200 years at m=100 unless overridden.
RunConfig preset_config(std::string_view name);

// Ridge/slope/valley stripes by row (or one uniform type), with
// `null_cells` null cells at the tail of the grid.
Landscape synthetic_terrain(std::int32_t rows, std::int32_t cols, double cell_area,
                            std::int32_t null_cells, std::int32_t uniform_terrain = -1);

// Terrain raster with values 0 (ridge), 1 (slope), 2 (valley); null cells
// stay null. The raster's cell size must agree with cell_area.
Landscape load_terrain(const std::filesystem::path& path, double cell_area);

Landscape make_landscape(const RunConfig& cfg);

struct RunResult {
    std::filesystem::path dir;
    double fine_seconds = 0.0;
    double coarse_seconds = 0.0;
};

// Runs the configured engines over the same landscape and the same
// pre-sampled fire maps, writing per-year output rasters
// (<variable>_<species|total>_<year>.asc), trajectory.csv and timings.csv
// per engine, and manifest.json at the top. Every byte except timings.csv
// is a pure function of (config minus threads, seed).
RunResult run_experiment(const RunConfig& cfg, const ModelParams& mp);

}  // namespace vlsim
