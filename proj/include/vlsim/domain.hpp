#pragma once

// Shared domain vocabulary: terrain, the four functional types, species
// parameters, landscape geometry, and the per-plant allometric formulas
// used identically by both engines.

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace vlsim {

inline constexpr std::size_t kNumSpecies = 4;
inline constexpr std::size_t kNumTerrains = 3;

enum class Terrain : std::uint8_t { ridge = 0, slope = 1, valley = 2 };

const char* terrain_name(Terrain t);

enum class Lifeform : std::uint8_t { tree, shrub };

struct FunctionalType {
    Lifeform lifeform;
    bool resprouter;
    bool fire_tolerant;
    std::string label;
};

struct SpeciesParams {
    FunctionalType type;
    double h_max;        // max height, m
    double hd_a;         // height-diameter shape, 1/cm
    double g_max;        // max annual diameter increment, cm/yr
    double d_max;        // max diameter, cm
    std::int32_t age_max;    // yr
    std::int32_t age_adult;  // reproductive age, yr
    std::int64_t c_seeds;    // seeds per mature plant per yr
    double c_leaf;           // leaf area coefficient, m²/cm²
    double p_b;              // baseline annual mortality probability
    double p_max;            // mortality probability at age_max
    double g_rate;           // germination fraction of seed bank per yr
    double fire_kill_frac;   // fraction killed by a fire event
    std::array<double, kNumTerrains> terrain_factor;  // growth/germination multiplier

    double terrain_f(Terrain t) const { return terrain_factor[static_cast<std::size_t>(t)]; }

    // Throws std::invalid_argument naming the offending key, prefixed with
    // `context` (e.g. "species quercus").
    void validate(std::string_view context) const;
};

// Model-wide constants; all values are design defaults, overridable from
// the parameter file.
struct EngineConstants {
    double ba_max_frac = 0.04;  // m² basal area per m² ground at full crowding
    double k_shade = 0.4;       // light-extinction shape
    double d0 = 0.5;            // seedling diameter, cm
    double c_b = 0.03;          // biomass coefficient, kg/cm^2.5
    double dead_decay = 0.10;   // dead-biomass decay fraction per yr
    double beta_age = 0.10;     // dead-age mean offset: mean = age_ave*(1+beta)
    double sigma_rel = 0.15;    // dead-attribute sd as a fraction of the mean

    void validate() const;
};

// Annual ignition probability per terrain type.
struct FireRegime {
    std::array<double, kNumTerrains> ignition = {0.02, 0.01, 0.005};

    double p(Terrain t) const { return ignition[static_cast<std::size_t>(t)]; }
    void validate() const;
};

// Everything the parameter file defines.
struct ModelParams {
    std::array<SpeciesParams, kNumSpecies> species;
    EngineConstants constants;
    FireRegime fire;

    void validate() const;
};

// The four shipped functional types: quercus, erica, pinus, cistus.
ModelParams default_params();

// Per-(cell, species) population bookkeeping for one simulated year:
// end = start − fire_dead − natural_dead + germinated, checked by tests.
struct CellAudit {
    std::array<std::int64_t, kNumSpecies> start{};
    std::array<std::int64_t, kNumSpecies> fire_dead{};
    std::array<std::int64_t, kNumSpecies> natural_dead{};
    std::array<std::int64_t, kNumSpecies> germinated{};
    std::array<std::int64_t, kNumSpecies> end{};
};

// Grid of terrain codes; -1 marks a null cell, which never holds state.
struct Landscape {
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    double cell_area = 100.0;  // m²
    std::vector<std::int8_t> terrain;

    std::size_t n_cells() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    bool active(std::size_t i) const { return terrain[i] >= 0; }
    Terrain terrain_at(std::size_t i) const { return static_cast<Terrain>(terrain[i]); }
    std::size_t n_active() const;
    double side() const;  // cell edge length, m
};

// ---- Per-plant allometry ----
// Operation order here is pinned to the data-parallel kernels so scalar
// call sites and kernel-driven loops produce bit-identical values.

// (π/4)/10⁴ folds the cm²→m² conversion into the basal-area coefficient.
inline constexpr double kBaScale = std::numbers::pi / 4.0 / 1.0e4;

// h_max·(1 − e^(−hd_a·d)), m. Negative d throws std::domain_error.
double height(double d, const SpeciesParams& p);

// (π/4)·d²/10⁴, m². Negative d throws std::domain_error.
double basal_area_single(double d);

// c_leaf·d², m². Negative d throws std::domain_error.
double leaf_area_single(double d, const SpeciesParams& p);

struct GrowthFactors {
    double space;  // 1 − ba_cell/(ba_max_frac·cell_area), clipped to [0,1]
    double light;  // e^(−k_shade·la_above/cell_area)
    double resp;   // 1 − d/d_max, clipped to [0,1]
};

// The crowding term is shared by every plant in a cell, so the engines
// compute it once; growth_factors must agree with them bit for bit.
double space_factor(double ba_cell, const EngineConstants& k, double cell_area);

// Coefficient on la_above inside the light factor: −k_shade/cell_area.
double shade_scale(const EngineConstants& k, double cell_area);

GrowthFactors growth_factors(double ba_cell, double la_above, double d, const SpeciesParams& p,
                             const EngineConstants& k, double cell_area);

// g_max·space·light·resp·terrain_factor, cm/yr
double growth_increment(const GrowthFactors& f, const SpeciesParams& p, double terrain_factor);

// p_b + (p_max−p_b)·age/age_max, clipped to [p_b, p_max]. The engines
// additionally force death at age ≥ age_max.
double mortality_probability(double age, const SpeciesParams& p);

// c_b·d^2.5, kg
double plant_biomass(double d, const EngineConstants& k);

}  // namespace vlsim
