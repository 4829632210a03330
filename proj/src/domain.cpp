#include "vlsim/domain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vlsim/fastmath.hpp"

namespace vlsim {

const char* terrain_name(Terrain t) {
    switch (t) {
        case Terrain::ridge: return "ridge";
        case Terrain::slope: return "slope";
        case Terrain::valley: return "valley";
    }
    return "?";
}

namespace {

[[noreturn]] void bad_param(std::string_view context, std::string_view key,
                            std::string_view rule) {
    throw std::invalid_argument(std::string(context) + ": " + std::string(key) + " " +
                                std::string(rule));
}

}  // namespace

void SpeciesParams::validate(std::string_view context) const {
    if (!(h_max > 0.0)) bad_param(context, "h_max", "must be > 0");
    if (!(hd_a > 0.0)) bad_param(context, "hd_a", "must be > 0");
    if (!(g_max > 0.0)) bad_param(context, "g_max", "must be > 0");
    if (!(d_max > 0.0)) bad_param(context, "d_max", "must be > 0");
    if (!(age_adult > 0)) bad_param(context, "age_adult", "must be > 0");
    if (!(age_adult < age_max)) bad_param(context, "age_adult", "must be < age_max");
    if (!(c_seeds >= 0)) bad_param(context, "c_seeds", "must be >= 0");
    if (!(c_seeds <= 2147483647)) bad_param(context, "c_seeds", "must fit in 32 bits");
    if (!(c_leaf >= 0.0)) bad_param(context, "c_leaf", "must be >= 0");
    if (!(p_b >= 0.0)) bad_param(context, "p_b", "must be >= 0");
    if (!(p_b <= p_max)) bad_param(context, "p_b", "must be <= p_max");
    if (!(p_max <= 1.0)) bad_param(context, "p_max", "must be <= 1");
    if (!(g_rate >= 0.0 && g_rate <= 1.0)) bad_param(context, "g_rate", "must be in [0,1]");
    if (!(fire_kill_frac >= 0.0 && fire_kill_frac <= 1.0))
        bad_param(context, "fire_kill_frac", "must be in [0,1]");
    for (const double f : terrain_factor)
        if (!(f >= 0.0)) bad_param(context, "terrain_factor", "must be >= 0");
}

void EngineConstants::validate() const {
    if (!(ba_max_frac > 0.0)) bad_param("constants", "ba_max_frac", "must be > 0");
    if (!(k_shade >= 0.0)) bad_param("constants", "k_shade", "must be >= 0");
    if (!(d0 > 0.0)) bad_param("constants", "d0", "must be > 0");
    if (!(c_b >= 0.0)) bad_param("constants", "c_b", "must be >= 0");
    if (!(dead_decay >= 0.0 && dead_decay <= 1.0))
        bad_param("constants", "dead_decay", "must be in [0,1]");
    if (!(beta_age >= 0.0)) bad_param("constants", "beta_age", "must be >= 0");
    if (!(sigma_rel >= 0.0)) bad_param("constants", "sigma_rel", "must be >= 0");
}

void FireRegime::validate() const {
    for (std::size_t t = 0; t < kNumTerrains; ++t) {
        if (!(ignition[t] >= 0.0 && ignition[t] <= 1.0))
            bad_param("fire_regime", terrain_name(static_cast<Terrain>(t)), "must be in [0,1]");
    }
}

void ModelParams::validate() const {
    for (const auto& sp : species) sp.validate("species " + sp.type.label);
    constants.validate();
    fire.validate();
}

ModelParams default_params() {
    ModelParams mp;
    // quercus: long-lived resprouting tree, slow start, deep shade tolerance
    mp.species[0] = {
        {Lifeform::tree, true, false, "quercus"},
        18.0, 0.035,          // h_max, hd_a
        0.30, 90.0,           // g_max, d_max
        240, 12,              // age_max, age_adult
        120, 0.12,            // c_seeds, c_leaf
        0.012, 0.35,          // p_b, p_max
        0.12, 0.30,           // g_rate, fire_kill_frac
        {0.8, 1.0, 1.2},
    };
    // erica: resprouting shrub, quick to refill gaps
    mp.species[1] = {
        {Lifeform::shrub, true, false, "erica"},
        3.0, 0.30,
        0.22, 9.0,
        60, 6,
        150, 0.22,
        0.020, 0.40,
        0.15, 0.35,
        {0.8, 1.0, 1.2},
    };
    // pinus: seeding tree, fire-tolerant canopy dominant
    mp.species[2] = {
        {Lifeform::tree, false, true, "pinus"},
        24.0, 0.045,
        0.40, 75.0,
        150, 10,
        200, 0.10,
        0.015, 0.35,
        0.15, 0.15,
        {0.8, 1.0, 1.2},
    };
    // cistus: short-lived seeder shrub, big banks, burns off almost entirely
    mp.species[3] = {
        {Lifeform::shrub, false, true, "cistus"},
        2.0, 0.40,
        0.25, 7.0,
        40, 4,
        300, 0.25,
        0.025, 0.50,
        0.20, 0.85,
        {0.8, 1.0, 1.2},
    };
    mp.validate();
    return mp;
}

std::size_t Landscape::n_active() const {
    std::size_t n = 0;
    for (const auto t : terrain)
        if (t >= 0) ++n;
    return n;
}

double Landscape::side() const { return std::sqrt(cell_area); }

double height(double d, const SpeciesParams& p) {
    if (d < 0.0) throw std::domain_error("height: negative diameter");
    return p.h_max * (1.0 - fastmath::exp(-p.hd_a * d));
}

double basal_area_single(double d) {
    if (d < 0.0) throw std::domain_error("basal_area_single: negative diameter");
    return kBaScale * (d * d);
}

double leaf_area_single(double d, const SpeciesParams& p) {
    if (d < 0.0) throw std::domain_error("leaf_area_single: negative diameter");
    return p.c_leaf * (d * d);
}

double space_factor(double ba_cell, const EngineConstants& k, double cell_area) {
    const double cap = k.ba_max_frac * cell_area;
    double space = 1.0 - ba_cell / cap;
    return space < 0.0 ? 0.0 : (space > 1.0 ? 1.0 : space);
}

double shade_scale(const EngineConstants& k, double cell_area) {
    // formed as one constant, matching the growth kernel
    return -(k.k_shade / cell_area);
}

GrowthFactors growth_factors(double ba_cell, double la_above, double d, const SpeciesParams& p,
                             const EngineConstants& k, double cell_area) {
    const double space = space_factor(ba_cell, k, cell_area);
    double light = fastmath::exp(shade_scale(k, cell_area) * la_above);
    light = light > 1.0 ? 1.0 : light;
    double resp = 1.0 - d / p.d_max;
    resp = resp < 0.0 ? 0.0 : (resp > 1.0 ? 1.0 : resp);
    return {space, light, resp};
}

double growth_increment(const GrowthFactors& f, const SpeciesParams& p, double terrain_factor) {
    return (((p.g_max * f.space) * f.light) * f.resp) * terrain_factor;
}

double mortality_probability(double age, const SpeciesParams& p) {
    const double p_raw = p.p_b + (p.p_max - p.p_b) * (age / static_cast<double>(p.age_max));
    return p_raw < p.p_b ? p.p_b : (p_raw > p.p_max ? p.p_max : p_raw);
}

double plant_biomass(double d, const EngineConstants& k) {
    return k.c_b * ((d * d) * std::sqrt(d));
}

}  // namespace vlsim
