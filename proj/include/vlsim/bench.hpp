#pragma once

#include <cstdint>
#include <utility>

#include "vlsim/domain.hpp"
#include "vlsim/run.hpp"

namespace vlsim {

struct BenchTimes {
    double fine_seconds = 0.0;    // 0 when the engine was not requested
    double coarse_seconds = 0.0;
    int repeats = 0;
};

// Stepping-only wall time: engines are built (untimed), then the year
// loop runs with no output writing; median over `repeats` fresh runs.
// Both engines see the same pre-sampled fire maps.
BenchTimes benchmark(const RunConfig& cfg, const ModelParams& mp, int repeats);

// (fine, coarse) persisted-scalar counts of the end-of-run state: three
// per plant versus four per (cell, species) cohort.
std::pair<std::int64_t, std::int64_t> state_cardinality(const RunConfig& cfg,
                                                        const ModelParams& mp);

}  // namespace vlsim
