#include "vlsim/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "vlsim/kernels.hpp"

namespace vlsim {

namespace {

// smallest diameter a drawn dead-attribute mean may take, cm
constexpr double kMinDiameter = 0.01;

double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

double germination_p(const SpeciesParams& sp, Terrain t) {
    const double p = sp.g_rate * sp.terrain_f(t);
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

void zero_cohort(Cohort& c) {
    c.n = 0;
    c.d_ave = 0.0;
    c.age_ave = 0.0;
    // seed bank survives its cohort; germination may refill later
}

// Removes n_dead plants with drawn attribute means; returns the count
// actually removed. Biomass of the dead feeds the cell pool.
std::int64_t remove_drawn(Cohort& c, std::int64_t n_dead, RngStream& rng,
                          const SpeciesParams& sp, const EngineConstants& k,
                          double& dead_pool) {
    if (n_dead <= 0 || c.n <= 0) return 0;
    if (n_dead >= c.n) {
        const std::int64_t n = c.n;
        dead_pool += static_cast<double>(n) * plant_biomass(c.d_ave, k);
        zero_cohort(c);
        return n;
    }
    const double age_mean = c.age_ave * (1.0 + k.beta_age);
    const double age_dead = clamp(rng.normal(age_mean, k.sigma_rel * age_mean), 1.0,
                                  static_cast<double>(sp.age_max));
    const double d_dead =
        clamp(rng.normal(c.d_ave, k.sigma_rel * c.d_ave), kMinDiameter, sp.d_max);
    dead_pool += static_cast<double>(n_dead) * plant_biomass(d_dead, k);
    const std::int64_t n_next = c.n - n_dead;
    c.d_ave = cohort_remove_average(c.d_ave, c.n, d_dead, n_dead, kMinDiameter, sp.d_max);
    c.age_ave = cohort_remove_average(c.age_ave, c.n, age_dead, n_dead, 1.0,
                                      static_cast<double>(sp.age_max));
    c.n = n_next;
    return n_dead;
}

}  // namespace

double cohort_remove_average(double avg, std::int64_t n, double dead_avg, std::int64_t n_dead,
                             double lo, double hi) {
    if (!(n_dead > 0 && n_dead < n))
        throw std::invalid_argument("cohort_remove_average: need 0 < n_dead < n");
    const double next = (avg * static_cast<double>(n) - dead_avg * static_cast<double>(n_dead)) /
                        static_cast<double>(n - n_dead);
    return clamp(next, lo, hi);
}

Cohort abstract_cohort(const PlantList& pl, std::int64_t seed_bank) {
    Cohort c;
    c.seed_bank = seed_bank;
    const std::int64_t n = static_cast<std::int64_t>(pl.size());
    if (n == 0) return c;
    const kernels::KernelTable& K = kernels::active_kernels();
    c.n = n;
    c.d_ave = K.sum(pl.d.data(), pl.size()) / static_cast<double>(n);
    std::int64_t age_total = 0;
    for (const std::int32_t a : pl.age) age_total += a;
    c.age_ave = static_cast<double>(age_total) / static_cast<double>(n);
    return c;
}

double basal_area_coarse(const Cohort& c) {
    return kBaScale * ((c.d_ave * c.d_ave) * static_cast<double>(c.n));
}

double leaf_area_coarse(const Cohort& c, const SpeciesParams& sp) {
    return sp.c_leaf * ((c.d_ave * c.d_ave) * static_cast<double>(c.n));
}

double leaf_area_above_coarse(const CoarseCell& cell, double h, const ModelParams& mp) {
    double total = 0.0;
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const Cohort& c = cell.cohorts[s];
        if (c.n <= 0) continue;
        const double H = height(c.d_ave, mp.species[s]);
        if (!(H > 0.0)) continue;
        const double share = clamp(1.0 - h / H, 0.0, 1.0);
        total += leaf_area_coarse(c, mp.species[s]) * share;
    }
    return total;
}

void decay_dead_biomass(CoarseCell& cell, const EngineConstants& k) {
    for (double& pool : cell.dead_biomass) pool *= 1.0 - k.dead_decay;
}

void apply_fire_coarse(CoarseCell& cell, bool burning, RngStream& rng, const ModelParams& mp,
                       CellAudit* audit) {
    if (!burning) return;
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        Cohort& c = cell.cohorts[s];
        const std::int64_t n_dead = rng.binomial(c.n, mp.species[s].fire_kill_frac);
        const std::int64_t removed =
            remove_drawn(c, n_dead, rng, mp.species[s], mp.constants, cell.dead_biomass[s]);
        if (audit) audit->fire_dead[s] += removed;
    }
}

void natural_death_coarse(CoarseCell& cell, RngStream& rng, const ModelParams& mp,
                          CellAudit* audit) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        Cohort& c = cell.cohorts[s];
        const SpeciesParams& sp = mp.species[s];
        const double p = c.age_ave >= static_cast<double>(sp.age_max)
                             ? 1.0
                             : mortality_probability(c.age_ave, sp);
        const std::int64_t n_dead = rng.binomial(c.n, p);
        const std::int64_t removed =
            remove_drawn(c, n_dead, rng, sp, mp.constants, cell.dead_biomass[s]);
        if (audit) audit->natural_dead[s] += removed;
    }
}

CoarseGrowthPlan compute_growth_coarse(const CoarseCell& cell, const ModelParams& mp,
                                       double cell_area) {
    CoarseGrowthPlan plan;
    double ba_cell = 0.0;
    for (const Cohort& c : cell.cohorts) ba_cell += basal_area_coarse(c);
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const Cohort& c = cell.cohorts[s];
        if (c.n <= 0) continue;
        const SpeciesParams& sp = mp.species[s];
        const double la_above = leaf_area_above_coarse(cell, height(c.d_ave, sp), mp);
        const GrowthFactors f =
            growth_factors(ba_cell, la_above, c.d_ave, sp, mp.constants, cell_area);
        plan.inc[s] = growth_increment(f, sp, sp.terrain_f(cell.terrain));
    }
    return plan;
}

void apply_growth_coarse(CoarseCell& cell, const CoarseGrowthPlan& plan, const ModelParams& mp) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        Cohort& c = cell.cohorts[s];
        if (c.n <= 0) continue;
        c.d_ave = std::min(c.d_ave + plan.inc[s], mp.species[s].d_max);
        // capped so age_ave stays in [1, age_max]; a cohort at the cap has
        // death probability 1 and empties next year anyway
        c.age_ave = std::min(c.age_ave + 1.0, static_cast<double>(mp.species[s].age_max));
    }
}

void grow_cohorts(CoarseCell& cell, const ModelParams& mp, double cell_area) {
    apply_growth_coarse(cell, compute_growth_coarse(cell, mp, cell_area), mp);
}

void germinate_coarse(CoarseCell& cell, RngStream& rng, const ModelParams& mp, std::int64_t m,
                      CellAudit* audit) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        Cohort& c = cell.cohorts[s];
        const SpeciesParams& sp = mp.species[s];
        const std::int64_t space_left = std::max<std::int64_t>(0, m - c.n);
        std::int64_t germ = rng.binomial(c.seed_bank, germination_p(sp, cell.terrain));
        germ = std::min(germ, space_left);
        if (germ > 0) {
            const double n0 = static_cast<double>(c.n);
            const double g = static_cast<double>(germ);
            const double n1 = n0 + g;
            c.d_ave = (c.d_ave * n0 + mp.constants.d0 * g) / n1;
            c.age_ave = (c.age_ave * n0 + 1.0 * g) / n1;
            c.n += germ;
            c.seed_bank -= germ;
        }
        if (audit) audit->germinated[s] += germ;
    }
}

void update_seed_bank_coarse(CoarseCell& cell, const ModelParams& mp) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        Cohort& c = cell.cohorts[s];
        const SpeciesParams& sp = mp.species[s];
        const bool mature = c.n > 0 && c.age_ave >= static_cast<double>(sp.age_adult);
        c.seed_bank = mature ? c.n * sp.c_seeds : 0;
    }
}

void step_cell_coarse(CoarseCell& cell, std::size_t cell_linear, std::int32_t year, bool burning,
                      std::uint64_t seed, const ModelParams& mp, double cell_area,
                      std::int64_t m, CellAudit* audit) {
    if (audit)
        for (std::size_t s = 0; s < kNumSpecies; ++s) audit->start[s] = cell.cohorts[s].n;
    const std::uint64_t y = static_cast<std::uint64_t>(year);
    decay_dead_biomass(cell, mp.constants);
    {
        RngStream rs = make_stream(seed, cell_linear, y, Phase::fire);
        apply_fire_coarse(cell, burning, rs, mp, audit);
    }
    const CoarseGrowthPlan plan = compute_growth_coarse(cell, mp, cell_area);
    {
        RngStream rs = make_stream(seed, cell_linear, y, Phase::natural_death);
        natural_death_coarse(cell, rs, mp, audit);
    }
    apply_growth_coarse(cell, plan, mp);
    {
        RngStream rs = make_stream(seed, cell_linear, y, Phase::germination);
        germinate_coarse(cell, rs, mp, m, audit);
    }
    update_seed_bank_coarse(cell, mp);
    if (audit)
        for (std::size_t s = 0; s < kNumSpecies; ++s) audit->end[s] = cell.cohorts[s].n;
}

CoarseCell init_coarse_cell(std::size_t cell_linear, Terrain terrain, const ModelParams& mp,
                            std::int64_t m, double initial_avg, std::uint64_t seed) {
    const FineCell sample = init_fine_cell(cell_linear, terrain, mp, m, initial_avg, seed);
    CoarseCell cell;
    cell.terrain = terrain;
    for (std::size_t s = 0; s < kNumSpecies; ++s)
        cell.cohorts[s] = abstract_cohort(sample.plants[s], sample.seed_bank[s]);
    return cell;
}

CoarseEngine::CoarseEngine(const Landscape& land, const ModelParams& mp, std::int64_t m,
                           double initial_avg, std::uint64_t seed)
    : land_(land), mp_(mp), m_(m), seed_(seed) {
    mp_.validate();
    if (m < 1) throw std::invalid_argument("CoarseEngine: m must be >= 1");
    for (std::size_t i = 0; i < land_.n_cells(); ++i) {
        if (land_.terrain[i] < 0) continue;
        cells_.push_back(init_coarse_cell(i, land_.terrain_at(i), mp_, m_, initial_avg, seed_));
        cell_linear_.push_back(i);
    }
    audits_.resize(cells_.size());
}

void CoarseEngine::step(std::int32_t year, const FireMap& fires, int n_threads) {
    if (fires.rows != land_.rows || fires.cols != land_.cols)
        throw std::invalid_argument("CoarseEngine::step: fire map geometry mismatch");
    const std::size_t n = cells_.size();
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            audits_[c] = CellAudit{};
            step_cell_coarse(cells_[c], cell_linear_[c], year, fires.at(cell_linear_[c]), seed_,
                             mp_, land_.cell_area, m_, &audits_[c]);
        }
    };
    if (n_threads <= 1 || n < 2) {
        work(0, n);
        return;
    }
    const std::size_t chunk = (n + static_cast<std::size_t>(n_threads) - 1) /
                              static_cast<std::size_t>(n_threads);
    std::vector<std::thread> workers;
    for (std::size_t lo = 0; lo < n; lo += chunk)
        workers.emplace_back(work, lo, std::min(n, lo + chunk));
    for (std::thread& w : workers) w.join();
}

void CoarseEngine::step_ordered(std::int32_t year, const FireMap& fires,
                                const std::vector<std::size_t>& order) {
    if (fires.rows != land_.rows || fires.cols != land_.cols)
        throw std::invalid_argument("CoarseEngine::step_ordered: fire map geometry mismatch");
    for (const std::size_t c : order) {
        audits_[c] = CellAudit{};
        step_cell_coarse(cells_[c], cell_linear_[c], year, fires.at(cell_linear_[c]), seed_, mp_,
                         land_.cell_area, m_, &audits_[c]);
    }
}

double coarse_cell_output(const CoarseCell& cell, std::size_t s, Variable v,
                          const ModelParams& mp, double cell_area) {
    const Cohort& c = cell.cohorts[s];
    switch (v) {
        case Variable::density: return static_cast<double>(c.n);
        case Variable::basal_area: return basal_area_coarse(c);
        case Variable::biomass:
            return mp.constants.c_b *
                   (((c.d_ave * c.d_ave) * std::sqrt(c.d_ave)) * static_cast<double>(c.n));
        case Variable::lai: return leaf_area_coarse(c, mp.species[s]) / cell_area;
        case Variable::seed_bank: return static_cast<double>(c.seed_bank);
        case Variable::dead_biomass: return cell.dead_biomass[s];
    }
    return 0.0;
}

AsciiRaster CoarseEngine::output_map(Variable v, int species) const {
    AsciiRaster r = make_raster(land_.rows, land_.cols, land_.side());
    for (std::size_t i = 0; i < r.size(); ++i)
        if (land_.terrain[i] < 0) r.nulls[i] = 1;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        double val = 0.0;
        if (species >= 0) {
            val = coarse_cell_output(cells_[c], static_cast<std::size_t>(species), v, mp_,
                                     land_.cell_area);
        } else {
            for (std::size_t s = 0; s < kNumSpecies; ++s)
                val += coarse_cell_output(cells_[c], s, v, mp_, land_.cell_area);
        }
        r.values[cell_linear_[c]] = val;
    }
    return r;
}

Totals CoarseEngine::totals() const {
    Totals t;
    for (const CoarseCell& cell : cells_) {
        for (std::size_t s = 0; s < kNumSpecies; ++s)
            for (const Variable v : kAllVariables)
                t[v] += coarse_cell_output(cell, s, v, mp_, land_.cell_area);
    }
    if (!cells_.empty()) t[Variable::lai] /= static_cast<double>(cells_.size());
    return t;
}

std::int64_t CoarseEngine::state_cardinality() const {
    return static_cast<std::int64_t>(4 * kNumSpecies * cells_.size());
}

}  // namespace vlsim
