#include "vlsim/bench.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <vector>

#include "vlsim/coarse.hpp"
#include "vlsim/fine.hpp"
#include "vlsim/fire.hpp"

namespace vlsim {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<FireMap> presample(const RunConfig& cfg, const ModelParams& mp,
                               const Landscape& land) {
    std::vector<FireMap> fires;
    fires.reserve(static_cast<std::size_t>(cfg.years));
    for (std::int32_t year = 1; year <= cfg.years; ++year) {
        if (cfg.fire_mode == FireMode::regime)
            fires.push_back(sample_fires(mp.fire, land, year, cfg.seed));
        else
            fires.push_back(FireMap::none(land));
    }
    return fires;
}

template <class Engine>
double timed_run(const Landscape& land, const RunConfig& cfg, const ModelParams& mp,
                 const std::vector<FireMap>& fires) {
    Engine eng(land, mp, cfg.m, cfg.initial_avg, cfg.seed);
    const auto t0 = Clock::now();
    for (std::int32_t year = 1; year <= cfg.years; ++year)
        eng.step(year, fires[static_cast<std::size_t>(year - 1)], cfg.threads);
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return xs[xs.size() / 2];
}

}  // namespace

BenchTimes benchmark(const RunConfig& cfg, const ModelParams& mp, int repeats) {
    cfg.validate();
    if (repeats < 1) throw std::invalid_argument("benchmark: repeats must be >= 1");
    if (cfg.fire_mode == FireMode::maps)
        throw std::invalid_argument("benchmark: fire map directories are not supported here");
    const Landscape land = make_landscape(cfg);
    const std::vector<FireMap> fires = presample(cfg, mp, land);

    BenchTimes out;
    out.repeats = repeats;
    if (cfg.engine == EngineKind::fine || cfg.engine == EngineKind::both) {
        std::vector<double> times;
        for (int r = 0; r < repeats; ++r)
            times.push_back(timed_run<FineEngine>(land, cfg, mp, fires));
        out.fine_seconds = median(std::move(times));
    }
    if (cfg.engine == EngineKind::coarse || cfg.engine == EngineKind::both) {
        std::vector<double> times;
        for (int r = 0; r < repeats; ++r)
            times.push_back(timed_run<CoarseEngine>(land, cfg, mp, fires));
        out.coarse_seconds = median(std::move(times));
    }
    return out;
}

std::pair<std::int64_t, std::int64_t> state_cardinality(const RunConfig& cfg,
                                                        const ModelParams& mp) {
    cfg.validate();
    if (cfg.fire_mode == FireMode::maps)
        throw std::invalid_argument("state_cardinality: fire map directories are not supported here");
    const Landscape land = make_landscape(cfg);
    const std::vector<FireMap> fires = presample(cfg, mp, land);

    FineEngine fine(land, mp, cfg.m, cfg.initial_avg, cfg.seed);
    CoarseEngine coarse(land, mp, cfg.m, cfg.initial_avg, cfg.seed);
    for (std::int32_t year = 1; year <= cfg.years; ++year) {
        fine.step(year, fires[static_cast<std::size_t>(year - 1)], cfg.threads);
        coarse.step(year, fires[static_cast<std::size_t>(year - 1)], cfg.threads);
    }
    return {fine.state_cardinality(), coarse.state_cardinality()};
}

}  // namespace vlsim
