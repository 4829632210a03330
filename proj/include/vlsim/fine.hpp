#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vlsim/domain.hpp"
#include "vlsim/fire.hpp"
#include "vlsim/outputs.hpp"
#include "vlsim/raster.hpp"
#include "vlsim/rng.hpp"

namespace vlsim {

// Plants of one species in one cell, structure-of-arrays so the growth and
// reduction kernels can stream them. Parallel vectors, equal length; order
// is stable (deaths compact, germination appends).
struct PlantList {
    std::vector<double> d;            // diameter, cm
    std::vector<std::int32_t> age;    // yr
    std::vector<std::int32_t> seeds;  // this year's seed output

    std::size_t size() const { return d.size(); }
    void append(double dd, std::int32_t a, std::int32_t s) {
        d.push_back(dd);
        age.push_back(a);
        seeds.push_back(s);
    }
};

struct FineCell {
    std::array<PlantList, kNumSpecies> plants;
    std::array<std::int64_t, kNumSpecies> seed_bank{};
    std::array<double, kNumSpecies> dead_biomass{};  // kg, decays then collects kills
    Terrain terrain = Terrain::slope;

    std::int64_t count(std::size_t s) const { return static_cast<std::int64_t>(plants[s].size()); }
};

// Diameter increments for every live plant, frozen between the fire and
// death phases so growth sees the post-fire, pre-death population.
struct GrowthPlan {
    std::array<std::vector<double>, kNumSpecies> inc;
};

// Reusable buffers for compute_growth_increments; one per worker thread.
struct GrowthScratch {
    struct Entry {
        double h;
        double la;
        std::uint32_t sp;
        std::uint32_t idx;
    };
    std::array<std::vector<double>, kNumSpecies> heights;
    std::array<std::vector<double>, kNumSpecies> la;
    std::array<std::vector<double>, kNumSpecies> la_above;
    std::vector<Entry> order;
    GrowthPlan plan;
};

// --- phase operations, applied in this order every year -------------------
// decay_dead_biomass → apply_fire_fine → compute_growth_increments →
// natural_death_fine → apply_growth_fine → germinate_fine →
// update_seed_bank_fine
//
// All draws come from the per-(seed, cell, year, phase) stream passed in;
// draw order is species-major, then plant order, and is part of the
// reproducibility contract.

void decay_dead_biomass(FineCell& cell, const EngineConstants& k);

// Bernoulli(fire_kill_frac) per plant when burning; survivors keep their
// order and attributes, kills feed the dead-biomass pool.
void apply_fire_fine(FineCell& cell, bool burning, RngStream& rng, const ModelParams& mp,
                     CellAudit* audit = nullptr);

// Per-plant increments from a snapshot of the whole cell: shared space
// factor, per-plant shading by strictly taller neighbours of any species.
void compute_growth_increments(const FineCell& cell, const ModelParams& mp, double cell_area,
                               GrowthPlan& plan, GrowthScratch& scratch);
GrowthPlan compute_growth_increments(const FineCell& cell, const ModelParams& mp,
                                     double cell_area);

// Bernoulli(mortality_probability) per plant; death is certain from
// age_max on. If `plan` is given it is compacted in step with the
// population so surviving increments stay aligned.
void natural_death_fine(FineCell& cell, RngStream& rng, const ModelParams& mp,
                        GrowthPlan* plan = nullptr, CellAudit* audit = nullptr);

// d += increment (capped at d_max), age += 1. Ages may reach age_max;
// the next death phase then removes those plants with certainty.
void apply_growth_fine(FineCell& cell, const GrowthPlan& plan, const ModelParams& mp);

// compute + apply in one call, for callers not interleaving death.
void grow_plants_fine(FineCell& cell, const ModelParams& mp, double cell_area);

// Binomial(seed_bank, g_rate·terrain_factor) germinants, clipped by the
// per-species space limit m; each becomes a d0-diameter age-1 seedling.
void germinate_fine(FineCell& cell, RngStream& rng, const ModelParams& mp, std::int64_t m,
                    CellAudit* audit = nullptr);

// Mature plants (age ≥ age_adult) set their seed output to c_seeds, others
// to zero; the cell bank is replaced by the per-plant sum.
void update_seed_bank_fine(FineCell& cell, const ModelParams& mp);

// Total leaf area of plants strictly taller than h, all species, m².
double leaf_area_above_fine(const FineCell& cell, double h, const ModelParams& mp);

// One full year for one cell (phases above, in order).
void step_cell_fine(FineCell& cell, std::size_t cell_linear, std::int32_t year, bool burning,
                    std::uint64_t seed, const ModelParams& mp, double cell_area, std::int64_t m,
                    GrowthScratch& scratch, CellAudit* audit = nullptr);

// Initial population for one cell: per species, min(Poisson(avg/4), m)
// plants with d ~ U(0.5, 5) and age ~ U{1..10}; empty banks and pools.
FineCell init_fine_cell(std::size_t cell_linear, Terrain terrain, const ModelParams& mp,
                        std::int64_t m, double initial_avg, std::uint64_t seed);

// -------------------------------------------------------------------------

class FineEngine {
  public:
    FineEngine(const Landscape& land, const ModelParams& mp, std::int64_t m, double initial_avg,
               std::uint64_t seed);

    // Advances every active cell one year. Cells are independent given the
    // fire map, so partitioning among threads cannot change the result; an
    // explicit `order` (active indices, serial) exists to prove that.
    void step(std::int32_t year, const FireMap& fires, int n_threads = 1);
    void step_ordered(std::int32_t year, const FireMap& fires,
                      const std::vector<std::size_t>& order);

    const Landscape& landscape() const { return land_; }
    const ModelParams& params() const { return mp_; }
    std::int64_t m() const { return m_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t n_active() const { return cells_.size(); }
    std::size_t linear_index(std::size_t active) const { return cell_linear_[active]; }
    const FineCell& cell(std::size_t active) const { return cells_[active]; }
    FineCell& cell_mut(std::size_t active) { return cells_[active]; }
    const std::vector<CellAudit>& last_audits() const { return audits_; }

    AsciiRaster output_map(Variable v, int species) const;  // species -1 = all
    Totals totals() const;

    // Scalars of evolving state: three per plant (d, age, seeds).
    std::int64_t state_cardinality() const;

  private:
    Landscape land_;
    ModelParams mp_;
    std::int64_t m_;
    std::uint64_t seed_;
    std::vector<FineCell> cells_;              // active cells only
    std::vector<std::size_t> cell_linear_;     // active index → grid index
    std::vector<CellAudit> audits_;
};

// Per-species value of one output variable in one cell (shared with the
// engine's rasters and totals; tests use it as the aggregation oracle).
double fine_cell_output(const FineCell& cell, std::size_t s, Variable v, const ModelParams& mp,
                        double cell_area);

}  // namespace vlsim
