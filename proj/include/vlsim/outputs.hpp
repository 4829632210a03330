#pragma once

#include <array>
#include <string>

#include "vlsim/domain.hpp"

namespace vlsim {

// The six mapped state variables both engines report.
enum class Variable : std::uint8_t {
    density,       // plants per cell
    basal_area,    // m² per cell
    biomass,       // kg per cell (live)
    lai,           // leaf area / cell area
    seed_bank,     // seeds per cell
    dead_biomass,  // kg per cell, decaying pool
};

inline constexpr std::array<Variable, 6> kAllVariables = {
    Variable::density,      Variable::basal_area, Variable::biomass,
    Variable::lai,          Variable::seed_bank,  Variable::dead_biomass,
};

const char* variable_name(Variable v);

// File label for a species index, or "total" for s < 0.
std::string species_label(const ModelParams& mp, int s);

// Landscape-wide aggregates for the trajectory table. lai is averaged over
// active cells; everything else is summed.
struct Totals {
    std::array<double, 6> value{};  // indexed by Variable

    double& operator[](Variable v) { return value[static_cast<std::size_t>(v)]; }
    double operator[](Variable v) const { return value[static_cast<std::size_t>(v)]; }
};

}  // namespace vlsim
