#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vlsim/domain.hpp"
#include "vlsim/fine.hpp"
#include "vlsim/fire.hpp"
#include "vlsim/outputs.hpp"
#include "vlsim/raster.hpp"
#include "vlsim/rng.hpp"

namespace vlsim {

// One species in one cell, reduced to four scalars.
struct Cohort {
    std::int64_t n = 0;
    double d_ave = 0.0;    // cm; 0 when empty
    double age_ave = 0.0;  // yr; 0 when empty
    std::int64_t seed_bank = 0;
};

struct CoarseCell {
    std::array<Cohort, kNumSpecies> cohorts;
    std::array<double, kNumSpecies> dead_biomass{};
    Terrain terrain = Terrain::slope;
};

// Attribute means of the dead are drawn, not tracked, so removing n_dead
// plants updates the survivor mean by inverting the weighted mean:
//   new_avg = (avg·n − dead_avg·n_dead) / (n − n_dead), clamped to [lo, hi].
// Requires 0 < n_dead < n.
double cohort_remove_average(double avg, std::int64_t n, double dead_avg, std::int64_t n_dead,
                             double lo, double hi);

// Cohort reduction of a plant list: count, mean diameter (compensated sum,
// identical to the abstraction the consistency harness applies), mean age.
Cohort abstract_cohort(const PlantList& pl, std::int64_t seed_bank);

double basal_area_coarse(const Cohort& c);
double leaf_area_coarse(const Cohort& c, const SpeciesParams& sp);

// Leaf area above height h with each cohort's leaf area spread linearly
// from the ground to its mean height: share above h is (1 − h/H).
double leaf_area_above_coarse(const CoarseCell& cell, double h, const ModelParams& mp);

// Same yearly phases as the per-plant engine, cohort-at-a-time. Death
// counts are Binomial(n, p); the dead's attribute means come from normal
// draws (age mean age_ave·(1+beta_age), diameter mean d_ave, both with
// sigma_rel relative spread, clamped to valid ranges). Draws happen only
// when 0 < n_dead < n: a full kill needs no attribute model and an empty
// one nothing at all.
void decay_dead_biomass(CoarseCell& cell, const EngineConstants& k);
void apply_fire_coarse(CoarseCell& cell, bool burning, RngStream& rng, const ModelParams& mp,
                       CellAudit* audit = nullptr);
void natural_death_coarse(CoarseCell& cell, RngStream& rng, const ModelParams& mp,
                          CellAudit* audit = nullptr);

struct CoarseGrowthPlan {
    std::array<double, kNumSpecies> inc{};
};

// Increment per cohort from a snapshot of the cell: shared space factor,
// shading evaluated at the cohort's own mean height.
CoarseGrowthPlan compute_growth_coarse(const CoarseCell& cell, const ModelParams& mp,
                                       double cell_area);
// d_ave += increment (capped at d_max), age_ave += 1, for non-empty cohorts.
void apply_growth_coarse(CoarseCell& cell, const CoarseGrowthPlan& plan, const ModelParams& mp);
void grow_cohorts(CoarseCell& cell, const ModelParams& mp, double cell_area);

// Binomial(seed_bank, g_rate·terrain_factor) germinants clipped by m; the
// cohort absorbs them by weighted mean with diameter d0 and age 1.
void germinate_coarse(CoarseCell& cell, RngStream& rng, const ModelParams& mp, std::int64_t m,
                      CellAudit* audit = nullptr);

// bank = n·c_seeds when the cohort's mean age has reached age_adult, else
// 0 — the all-or-nothing counterpart of the per-plant maturity sum.
void update_seed_bank_coarse(CoarseCell& cell, const ModelParams& mp);

void step_cell_coarse(CoarseCell& cell, std::size_t cell_linear, std::int32_t year, bool burning,
                      std::uint64_t seed, const ModelParams& mp, double cell_area,
                      std::int64_t m, CellAudit* audit = nullptr);

// Cohorts abstracted from the same per-cell sample the per-plant engine
// initializes from (identical streams), so both engines start at H(state).
CoarseCell init_coarse_cell(std::size_t cell_linear, Terrain terrain, const ModelParams& mp,
                            std::int64_t m, double initial_avg, std::uint64_t seed);

class CoarseEngine {
  public:
    CoarseEngine(const Landscape& land, const ModelParams& mp, std::int64_t m,
                 double initial_avg, std::uint64_t seed);

    void step(std::int32_t year, const FireMap& fires, int n_threads = 1);
    void step_ordered(std::int32_t year, const FireMap& fires,
                      const std::vector<std::size_t>& order);

    const Landscape& landscape() const { return land_; }
    const ModelParams& params() const { return mp_; }
    std::int64_t m() const { return m_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t n_active() const { return cells_.size(); }
    std::size_t linear_index(std::size_t active) const { return cell_linear_[active]; }
    const CoarseCell& cell(std::size_t active) const { return cells_[active]; }
    CoarseCell& cell_mut(std::size_t active) { return cells_[active]; }
    const std::vector<CellAudit>& last_audits() const { return audits_; }

    AsciiRaster output_map(Variable v, int species) const;
    Totals totals() const;

    // Four scalars per (cell, species) cohort, live or empty.
    std::int64_t state_cardinality() const;

  private:
    Landscape land_;
    ModelParams mp_;
    std::int64_t m_;
    std::uint64_t seed_;
    std::vector<CoarseCell> cells_;
    std::vector<std::size_t> cell_linear_;
    std::vector<CellAudit> audits_;
};

double coarse_cell_output(const CoarseCell& cell, std::size_t s, Variable v,
                          const ModelParams& mp, double cell_area);

}  // namespace vlsim
