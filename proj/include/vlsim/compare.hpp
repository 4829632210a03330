#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vlsim/outputs.hpp"

namespace vlsim {

// Fidelity summary of two engine output directories (each holding the
// raster series plus trajectory.csv). Difference metrics are symmetric in
// the two directories; runtime_ratio is b over a.
struct ComparisonReport {
    std::vector<std::int32_t> years;  // years with maps in both directories
    // per variable, aligned with `years`: mean over non-null cells of
    // |a−b| / max(|a|, |b|, 1e-9) on the *_total_* maps
    std::array<std::vector<double>, 6> rel_diff;
    std::array<double, 6> mean_rel_diff{};  // averaged over years

    double final_density_a = 0.0, final_density_b = 0.0;
    double final_basal_area_a = 0.0, final_basal_area_b = 0.0;
    double max_basal_area_ratio = 1.0;  // max over years of max(a/b, b/a)

    double runtime_a = 0.0, runtime_b = 0.0;  // seconds, from timings.csv
    double runtime_ratio = 0.0;               // b / a

    std::string to_string() const;
};

// Throws std::runtime_error on geometry mismatch, differing map-year sets,
// differing null masks, or missing trajectories.
ComparisonReport compare_runs(const std::filesystem::path& dir_a,
                              const std::filesystem::path& dir_b);

}  // namespace vlsim
