#include "vlsim/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlsim/coarse.hpp"
#include "vlsim/fine.hpp"
#include "vlsim/fire.hpp"
#include "vlsim/kernels.hpp"
#include "vlsim/outputs.hpp"
#include "vlsim/raster.hpp"

namespace vlsim {

const char* engine_kind_name(EngineKind e) {
    switch (e) {
        case EngineKind::fine: return "fine";
        case EngineKind::coarse: return "coarse";
        case EngineKind::both: return "both";
    }
    return "?";
}

const char* fire_mode_name(FireMode f) {
    switch (f) {
        case FireMode::none: return "none";
        case FireMode::regime: return "regime";
        case FireMode::maps: return "maps";
    }
    return "?";
}

void RunConfig::validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("config: rows and cols must be >= 1");
    if (!(cell_area > 0.0)) throw std::invalid_argument("config: cell_area must be > 0");
    if (m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (!(initial_avg >= 0.0)) throw std::invalid_argument("config: initial_avg must be >= 0");
    if (years < 0) throw std::invalid_argument("config: years must be >= 0");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (map_stride < 0) throw std::invalid_argument("config: map_stride must be >= 0");
    if (fire_mode == FireMode::maps && fire_dir.empty())
        throw std::invalid_argument("config: fire mode 'maps' needs a fire map directory");
    const std::int64_t cells = static_cast<std::int64_t>(rows) * cols;
    if (null_cells < 0 || null_cells >= cells)
        throw std::invalid_argument("config: null_cells must leave at least one active cell");
    if (uniform_terrain < -1 || uniform_terrain >= static_cast<std::int32_t>(kNumTerrains))
        throw std::invalid_argument("config: uniform_terrain must be -1, 0, 1 or 2");
}

RunConfig preset_config(std::string_view name) {
    RunConfig cfg;
    if (name == "single-cell") {
        cfg.rows = 2;
        cfg.cols = 2;
        cfg.null_cells = 3;
        cfg.fire_mode = FireMode::none;
    } else if (name == "5k") {
        cfg.rows = 50;
        cfg.cols = 100;
        cfg.fire_mode = FireMode::regime;
    } else if (name == "20k") {
        cfg.rows = 100;
        cfg.cols = 200;
        cfg.cell_area = 25.0;
        cfg.fire_mode = FireMode::regime;
    } else if (name == "200") {
        cfg.rows = 10;
        cfg.cols = 20;
        cfg.fire_mode = FireMode::regime;
    } else if (name == "bench-500") {
        cfg.rows = 20;
        cfg.cols = 25;
        cfg.fire_mode = FireMode::none;
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) +
                                    "' (want single-cell, 5k, 20k, 200 or bench-500)");
    }
    return cfg;
}

Landscape synthetic_terrain(std::int32_t rows, std::int32_t cols, double cell_area,
                            std::int32_t null_cells, std::int32_t uniform_terrain) {
    Landscape land;
    land.rows = rows;
    land.cols = cols;
    land.cell_area = cell_area;
    land.terrain.assign(static_cast<std::size_t>(rows) * cols, 0);
    for (std::int32_t r = 0; r < rows; ++r) {
        const std::int8_t t = uniform_terrain >= 0 ? static_cast<std::int8_t>(uniform_terrain)
                                                   : static_cast<std::int8_t>(r % kNumTerrains);
        for (std::int32_t c = 0; c < cols; ++c)
            land.terrain[static_cast<std::size_t>(r) * cols + c] = t;
    }
    for (std::int32_t i = 0; i < null_cells; ++i)
        land.terrain[land.terrain.size() - 1 - static_cast<std::size_t>(i)] = -1;
    return land;
}

Landscape load_terrain(const std::filesystem::path& path, double cell_area) {
    const AsciiRaster r = read_raster(path);
    const double side = r.side();
    if (std::fabs(side * side - cell_area) > 1e-6 * cell_area)
        throw std::runtime_error(path.string() + ": raster cell area " +
                                 std::to_string(side * side) +
                                 " disagrees with configured cell_area " +
                                 std::to_string(cell_area));
    Landscape land;
    land.rows = r.rows;
    land.cols = r.cols;
    land.cell_area = cell_area;
    land.terrain.assign(r.size(), -1);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.nulls[i]) continue;
        const double v = r.values[i];
        if (v != 0.0 && v != 1.0 && v != 2.0)
            throw std::runtime_error(path.string() + ": terrain value " +
                                     format_raster_value(v) + " is not 0, 1 or 2");
        land.terrain[i] = static_cast<std::int8_t>(v);
    }
    return land;
}

Landscape make_landscape(const RunConfig& cfg) {
    if (!cfg.terrain_path.empty()) return load_terrain(cfg.terrain_path, cfg.cell_area);
    return synthetic_terrain(cfg.rows, cfg.cols, cfg.cell_area, cfg.null_cells,
                             cfg.uniform_terrain);
}

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::vector<FireMap> presample_fires(const RunConfig& cfg, const ModelParams& mp,
                                     const Landscape& land) {
    std::vector<FireMap> fires;
    fires.reserve(static_cast<std::size_t>(cfg.years));
    for (std::int32_t year = 1; year <= cfg.years; ++year) {
        switch (cfg.fire_mode) {
            case FireMode::none: fires.push_back(FireMap::none(land)); break;
            case FireMode::regime:
                fires.push_back(sample_fires(mp.fire, land, year, cfg.seed));
                break;
            case FireMode::maps: {
                const fs::path p = cfg.fire_dir / ("fire_" + std::to_string(year) + ".asc");
                fires.push_back(fs::exists(p) ? load_fire_map(p, land) : FireMap::none(land));
                break;
            }
        }
    }
    return fires;
}

bool write_maps_this_year(const RunConfig& cfg, std::int32_t year) {
    if (year == 0 || year == cfg.years) return true;
    return cfg.map_stride > 0 && year % cfg.map_stride == 0;
}

std::string map_name(const ModelParams& mp, Variable v, int s, std::int32_t year) {
    return std::string(variable_name(v)) + "_" + species_label(mp, s) + "_" +
           std::to_string(year) + ".asc";
}

void append_csv_value(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

// Steps one engine through all years, writing rasters, trajectory and
// timings. Returns total stepping+writing seconds.
template <class Engine>
double drive(Engine& eng, const RunConfig& cfg, const ModelParams& mp,
             const std::vector<FireMap>& fires, const fs::path& dir,
             std::vector<std::string>& inventory) {
    fs::create_directories(dir);
    std::string trajectory = "year,density,basal_area,biomass,lai,seed_bank,dead_biomass\n";
    std::string timings = "year,millis\n";

    const auto emit_maps = [&](std::int32_t year) {
        if (!write_maps_this_year(cfg, year)) return;
        for (const Variable v : kAllVariables) {
            for (int s = -1; s < static_cast<int>(kNumSpecies); ++s) {
                const std::string name = map_name(mp, v, s, year);
                write_raster(eng.output_map(v, s), dir / name);
                inventory.push_back(name);
            }
        }
    };
    const auto emit_trajectory = [&](std::int32_t year) {
        const Totals t = eng.totals();
        trajectory += std::to_string(year);
        for (const Variable v : kAllVariables) {
            trajectory += ',';
            append_csv_value(trajectory, t[v]);
        }
        trajectory += '\n';
    };

    const auto start = Clock::now();
    emit_maps(0);
    emit_trajectory(0);
    for (std::int32_t year = 1; year <= cfg.years; ++year) {
        const auto y0 = Clock::now();
        eng.step(year, fires[static_cast<std::size_t>(year - 1)], cfg.threads);
        emit_maps(year);
        emit_trajectory(year);
        const std::chrono::duration<double, std::milli> ms = Clock::now() - y0;
        timings += std::to_string(year) + ",";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f\n", ms.count());
        timings += buf;
    }
    const std::chrono::duration<double> total = Clock::now() - start;

    std::ofstream(dir / "trajectory.csv", std::ios::binary) << trajectory;
    std::ofstream(dir / "timings.csv", std::ios::binary) << timings;
    inventory.push_back("trajectory.csv");
    return total.count();
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, const ModelParams& mp) {
    cfg.validate();
    mp.validate();
    if (cfg.out_dir.empty()) throw std::invalid_argument("config: out_dir is empty");
    const Landscape land = make_landscape(cfg);
    const std::vector<FireMap> fires = presample_fires(cfg, mp, land);

    RunResult result;
    result.dir = cfg.out_dir;
    fs::create_directories(cfg.out_dir);

    nlohmann::ordered_json manifest;
    // threads and out_dir are execution details, not experiment identity;
    // leaving them out keeps reruns byte-comparable
    manifest["config"] = {
        {"rows", cfg.rows},
        {"cols", cfg.cols},
        {"cell_area", cfg.cell_area},
        {"m", cfg.m},
        {"initial_avg", cfg.initial_avg},
        {"years", cfg.years},
        {"seed", cfg.seed},
        {"engine", engine_kind_name(cfg.engine)},
        {"fire_mode", fire_mode_name(cfg.fire_mode)},
        {"terrain", cfg.terrain_path.empty() ? std::string("synthetic")
                                             : cfg.terrain_path.string()},
        {"null_cells", cfg.null_cells},
        {"uniform_terrain", cfg.uniform_terrain},
        {"map_stride", cfg.map_stride},
    };
    manifest["active_cells"] = land.n_active();
    manifest["kernels"] = kernels::active_kernels().name;

    if (cfg.engine == EngineKind::fine || cfg.engine == EngineKind::both) {
        FineEngine eng(land, mp, cfg.m, cfg.initial_avg, cfg.seed);
        std::vector<std::string> inventory;
        result.fine_seconds = drive(eng, cfg, mp, fires, cfg.out_dir / "fine", inventory);
        manifest["files"]["fine"] = inventory;
    }
    if (cfg.engine == EngineKind::coarse || cfg.engine == EngineKind::both) {
        CoarseEngine eng(land, mp, cfg.m, cfg.initial_avg, cfg.seed);
        std::vector<std::string> inventory;
        result.coarse_seconds = drive(eng, cfg, mp, fires, cfg.out_dir / "coarse", inventory);
        manifest["files"]["coarse"] = inventory;
    }

    std::ofstream mf(cfg.out_dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
    if (!mf) throw std::runtime_error((cfg.out_dir / "manifest.json").string() + ": write failed");
    return result;
}

}  // namespace vlsim
