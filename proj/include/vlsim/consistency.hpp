#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "vlsim/coarse.hpp"
#include "vlsim/fine.hpp"

namespace vlsim {

// H: the homomorphic state mapping. Per species: plant count, arithmetic
// mean diameter and age, seed bank unchanged; empty species map to
// all-zero cohorts by convention. Terrain and dead pools carry over.
CoarseCell abstraction_map(const FineCell& cell);

// The five per-cell phase operations both engines share.
enum class ConsistencyPhase : std::uint8_t { growth, fire, natural_death, germination, seed_bank };

const char* consistency_phase_name(ConsistencyPhase ph);

// One field's evidence: the two expectations, their Monte-Carlo standard
// errors (0 for deterministic phases), and the relative gap of the means.
struct ConsistencyField {
    double fine_mean = 0.0;
    double coarse_mean = 0.0;
    double fine_se = 0.0;
    double coarse_se = 0.0;
    double rel_diff = 0.0;  // |fine−coarse| / max(|fine|, |coarse|, 1e-9)

    double combined_se() const;
};

struct SpeciesConsistency {
    ConsistencyField n;
    ConsistencyField d_ave;
    ConsistencyField age_ave;
    ConsistencyField seed_bank;
};

struct ConsistencyRecord {
    ConsistencyPhase phase{};
    int trials = 1;
    std::array<SpeciesConsistency, kNumSpecies> species;
    double max_rel_diff = 0.0;

    std::string to_string() const;
};

// Does one phase commute with H on this cell? Compares E[H(phase_fine(s))]
// against E[phase_coarse(H(s))] fieldwise. growth and seed-bank are
// deterministic and evaluated once; the stochastic phases average over
// `n_trials` paired trials with independent streams per side.
ConsistencyRecord one_step_consistency(const FineCell& cell, ConsistencyPhase phase,
                                       const ModelParams& mp, double cell_area, std::int64_t m,
                                       int n_trials, std::uint64_t seed);

}  // namespace vlsim
