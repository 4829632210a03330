// Command-line front end: run experiments, compare runs, probe one-step
// consistency, benchmark, and report state cardinality.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlsim/bench.hpp"
#include "vlsim/compare.hpp"
#include "vlsim/consistency.hpp"
#include "vlsim/fine.hpp"
#include "vlsim/kernels.hpp"
#include "vlsim/params_io.hpp"
#include "vlsim/run.hpp"

namespace {

using namespace vlsim;

EngineKind parse_engine(const std::string& s) {
    if (s == "fine") return EngineKind::fine;
    if (s == "coarse") return EngineKind::coarse;
    if (s == "both") return EngineKind::both;
    throw CLI::ValidationError("--engine", "expected fine, coarse or both");
}

ConsistencyPhase parse_phase(const std::string& s) {
    if (s == "growth") return ConsistencyPhase::growth;
    if (s == "fire") return ConsistencyPhase::fire;
    if (s == "natural-death") return ConsistencyPhase::natural_death;
    if (s == "germination") return ConsistencyPhase::germination;
    if (s == "seed-bank") return ConsistencyPhase::seed_bank;
    throw CLI::ValidationError(
        "--phase", "expected growth, fire, natural-death, germination or seed-bank");
}

RunConfig config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    nlohmann::json j = nlohmann::json::parse(in);
    RunConfig cfg;
    const auto take = [&j](const char* key, auto& into) {
        if (const auto it = j.find(key); it != j.end()) {
            it->get_to(into);
            j.erase(it);
        }
    };
    take("rows", cfg.rows);
    take("cols", cfg.cols);
    take("cell_area", cfg.cell_area);
    take("m", cfg.m);
    take("initial_avg", cfg.initial_avg);
    take("years", cfg.years);
    take("seed", cfg.seed);
    take("threads", cfg.threads);
    take("null_cells", cfg.null_cells);
    take("uniform_terrain", cfg.uniform_terrain);
    take("map_stride", cfg.map_stride);
    std::string s;
    if (j.contains("engine")) {
        j.at("engine").get_to(s);
        cfg.engine = parse_engine(s);
        j.erase("engine");
    }
    if (j.contains("fire_mode")) {
        j.at("fire_mode").get_to(s);
        if (s == "none")
            cfg.fire_mode = FireMode::none;
        else if (s == "regime")
            cfg.fire_mode = FireMode::regime;
        else if (s == "maps")
            cfg.fire_mode = FireMode::maps;
        else
            throw std::runtime_error(path + ": fire_mode must be none, regime or maps");
        j.erase("fire_mode");
    }
    if (j.contains("fire_dir")) {
        j.at("fire_dir").get_to(s);
        cfg.fire_dir = s;
        j.erase("fire_dir");
    }
    if (j.contains("terrain")) {
        j.at("terrain").get_to(s);
        cfg.terrain_path = s;
        j.erase("terrain");
    }
    if (!j.empty())
        throw std::runtime_error(path + ": unknown config key " + j.begin().key());
    return cfg;
}

// Flags shared by run/bench/cardinality.
struct ConfigFlags {
    std::string preset, config_path, engine, params_path, terrain_path, fires_dir;
    bool fire_regime = false;
    bool prefer_fire_maps = false;
    std::int32_t years = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "named configuration")
            ->check(CLI::IsMember({"single-cell", "5k", "20k", "200", "bench-500"}));
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--engine", engine, "fine, coarse or both");
        cmd->add_option("--params", params_path, "parameter file (default: built-in types)");
        cmd->add_option("--terrain", terrain_path, "terrain raster (default: synthetic)");
        cmd->add_option("--fires", fires_dir, "directory of per-year fire maps");
        cmd->add_flag("--fire-regime", fire_regime, "sample fires from the regime");
        cmd->add_flag("--prefer-fire-maps", prefer_fire_maps,
                      "when both --fires and --fire-regime are given, maps win");
        cmd->add_option("--years", years, "simulated years");
        cmd->add_option("--seed", seed, "master seed")->each([this](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--threads", threads, "worker threads");
    }

    RunConfig resolve() const {
        if (!preset.empty() && !config_path.empty())
            throw std::runtime_error("give either --preset or --config, not both");
        RunConfig cfg = !preset.empty()      ? preset_config(preset)
                        : !config_path.empty() ? config_from_json(config_path)
                                               : RunConfig{};
        if (!engine.empty()) cfg.engine = parse_engine(engine);
        if (years >= 0) cfg.years = years;
        if (seed_set) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        if (!terrain_path.empty()) cfg.terrain_path = terrain_path;
        if (!fires_dir.empty() && fire_regime && !prefer_fire_maps)
            throw std::runtime_error(
                "--fires and --fire-regime both given; add --prefer-fire-maps to pick maps");
        if (!fires_dir.empty()) {
            cfg.fire_mode = FireMode::maps;
            cfg.fire_dir = fires_dir;
        } else if (fire_regime) {
            cfg.fire_mode = FireMode::regime;
        }
        return cfg;
    }

    ModelParams params() const {
        return params_path.empty() ? default_params() : read_params(params_path);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-resolution vegetation landscape simulator"};
    app.require_subcommand(1);
    std::string kernels;
    app.add_option("--kernels", kernels, "kernel variant: auto, scalar, avx2, neon");

    ConfigFlags run_flags;
    std::string run_out = "out";
    CLI::App* cmd_run = app.add_subcommand("run", "run an experiment, write outputs");
    run_flags.add_to(cmd_run);
    cmd_run->add_option("--out", run_out, "output directory (default: ./out)");

    CLI::App* cmd_compare = app.add_subcommand("compare", "fidelity report for two run dirs");
    std::string dir_a, dir_b;
    cmd_compare->add_option("dir_a", dir_a, "first engine output directory")->required();
    cmd_compare->add_option("dir_b", dir_b, "second engine output directory")->required();

    CLI::App* cmd_cons = app.add_subcommand("consistency", "one-step homomorphism check");
    std::string phase = "natural-death", cons_params;
    int trials = 1000, warm_years = 20;
    std::uint64_t cons_seed = 1;
    cmd_cons->add_option("--phase", phase, "growth, fire, natural-death, germination, seed-bank");
    cmd_cons->add_option("--trials", trials, "Monte-Carlo trials for stochastic phases");
    cmd_cons->add_option("--warm-years", warm_years, "years to age the probe cell first");
    cmd_cons->add_option("--seed", cons_seed, "seed for the probe cell and trials");
    cmd_cons->add_option("--params", cons_params, "parameter file");

    ConfigFlags bench_flags;
    int repeats = 3;
    CLI::App* cmd_bench = app.add_subcommand("bench", "stepping-only wall-clock timing");
    bench_flags.add_to(cmd_bench);
    cmd_bench->add_option("--repeats", repeats, "runs per engine; median reported");

    ConfigFlags card_flags;
    CLI::App* cmd_card = app.add_subcommand("cardinality", "persisted scalars per engine");
    card_flags.add_to(cmd_card);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!kernels.empty() && !vlsim::kernels::set_active_kernels(kernels))
            throw std::runtime_error("unknown or unavailable kernel variant: " + kernels);

        if (cmd_run->parsed()) {
            RunConfig cfg = run_flags.resolve();
            cfg.out_dir = run_out;
            const RunResult res = run_experiment(cfg, run_flags.params());
            std::printf("wrote %s\n", res.dir.string().c_str());
            if (res.fine_seconds > 0) std::printf("fine   %.3f s\n", res.fine_seconds);
            if (res.coarse_seconds > 0) std::printf("coarse %.3f s\n", res.coarse_seconds);
        } else if (cmd_compare->parsed()) {
            std::cout << compare_runs(dir_a, dir_b).to_string();
        } else if (cmd_cons->parsed()) {
            const ModelParams mp =
                cons_params.empty() ? default_params() : read_params(cons_params);
            const std::int64_t m = 100;
            FineCell cell = init_fine_cell(0, Terrain::slope, mp, m, 20.0, cons_seed);
            GrowthScratch scratch;
            for (std::int32_t y = 1; y <= warm_years; ++y)
                step_cell_fine(cell, 0, y, false, cons_seed, mp, 100.0, m, scratch);
            std::cout << one_step_consistency(cell, parse_phase(phase), mp, 100.0, m, trials,
                                              cons_seed + 1)
                             .to_string();
        } else if (cmd_bench->parsed()) {
            const BenchTimes t = benchmark(bench_flags.resolve(), bench_flags.params(), repeats);
            std::printf("repeats %d\n", t.repeats);
            if (t.fine_seconds > 0) std::printf("fine   %.3f s\n", t.fine_seconds);
            if (t.coarse_seconds > 0) std::printf("coarse %.3f s\n", t.coarse_seconds);
            if (t.fine_seconds > 0 && t.coarse_seconds > 0)
                std::printf("coarse/fine %.4f\n", t.coarse_seconds / t.fine_seconds);
        } else if (cmd_card->parsed()) {
            const auto [fine, coarse] = state_cardinality(card_flags.resolve(),
                                                          card_flags.params());
            std::printf("fine   %lld\ncoarse %lld\n", static_cast<long long>(fine),
                        static_cast<long long>(coarse));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
