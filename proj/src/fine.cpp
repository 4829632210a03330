#include "vlsim/fine.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "vlsim/kernels.hpp"

namespace vlsim {

namespace {

// germination success probability, clamped to a valid Bernoulli p
double germination_p(const SpeciesParams& sp, Terrain t) {
    const double p = sp.g_rate * sp.terrain_f(t);
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

void compact(PlantList& pl, std::vector<double>* inc, std::size_t w) {
    pl.d.resize(w);
    pl.age.resize(w);
    pl.seeds.resize(w);
    if (inc) inc->resize(w);
}

}  // namespace

void decay_dead_biomass(FineCell& cell, const EngineConstants& k) {
    for (double& pool : cell.dead_biomass) pool *= 1.0 - k.dead_decay;
}

void apply_fire_fine(FineCell& cell, bool burning, RngStream& rng, const ModelParams& mp,
                     CellAudit* audit) {
    if (!burning) return;
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        PlantList& pl = cell.plants[s];
        const double kill = mp.species[s].fire_kill_frac;
        const std::size_t n = pl.size();
        std::size_t w = 0;
        double dead_mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.bernoulli(kill)) {
                dead_mass += plant_biomass(pl.d[i], mp.constants);
                continue;
            }
            pl.d[w] = pl.d[i];
            pl.age[w] = pl.age[i];
            pl.seeds[w] = pl.seeds[i];
            ++w;
        }
        compact(pl, nullptr, w);
        cell.dead_biomass[s] += dead_mass;
        if (audit) audit->fire_dead[s] += static_cast<std::int64_t>(n - w);
    }
}

void compute_growth_increments(const FineCell& cell, const ModelParams& mp, double cell_area,
                               GrowthPlan& plan, GrowthScratch& scratch) {
    const kernels::KernelTable& K = kernels::active_kernels();
    std::size_t n_all = 0;
    double ba_cell = 0.0;
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const PlantList& pl = cell.plants[s];
        const SpeciesParams& sp = mp.species[s];
        const std::size_t n = pl.size();
        n_all += n;
        scratch.heights[s].resize(n);
        scratch.la[s].resize(n);
        K.heights(pl.d.data(), n, sp.h_max, sp.hd_a, scratch.heights[s].data());
        K.scaled_square(pl.d.data(), n, sp.c_leaf, scratch.la[s].data());
        ba_cell += kBaScale * K.sum_square(pl.d.data(), n);
        scratch.la_above[s].assign(n, 0.0);
        plan.inc[s].resize(n);
    }

    // Shading: every plant is shaded by the leaf area of strictly taller
    // plants of any species. One sort plus a prefix sum over equal-height
    // groups gives all n values; plants in the same group never shade
    // each other, which preserves the strict inequality.
    scratch.order.clear();
    scratch.order.reserve(n_all);
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const auto& h = scratch.heights[s];
        const auto& la = scratch.la[s];
        for (std::size_t i = 0; i < h.size(); ++i)
            scratch.order.push_back({h[i], la[i], static_cast<std::uint32_t>(s),
                                     static_cast<std::uint32_t>(i)});
    }
    std::sort(scratch.order.begin(), scratch.order.end(),
              [](const GrowthScratch::Entry& a, const GrowthScratch::Entry& b) {
                  if (a.h != b.h) return a.h > b.h;
                  if (a.sp != b.sp) return a.sp < b.sp;
                  return a.idx < b.idx;
              });
    double cum = 0.0;
    for (std::size_t i = 0; i < scratch.order.size();) {
        std::size_t j = i;
        double group = 0.0;
        while (j < scratch.order.size() && scratch.order[j].h == scratch.order[i].h) {
            const GrowthScratch::Entry& e = scratch.order[j];
            scratch.la_above[e.sp][e.idx] = cum;
            group += e.la;
            ++j;
        }
        cum += group;
        i = j;
    }

    const double space = space_factor(ba_cell, mp.constants, cell_area);
    const double scale = shade_scale(mp.constants, cell_area);
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const PlantList& pl = cell.plants[s];
        const SpeciesParams& sp = mp.species[s];
        const kernels::GrowthTerms terms{sp.g_max * space, scale, sp.d_max,
                                         sp.terrain_f(cell.terrain)};
        K.growth_increments(pl.d.data(), scratch.la_above[s].data(), pl.size(), terms,
                            plan.inc[s].data());
    }
}

GrowthPlan compute_growth_increments(const FineCell& cell, const ModelParams& mp,
                                     double cell_area) {
    GrowthPlan plan;
    GrowthScratch scratch;
    compute_growth_increments(cell, mp, cell_area, plan, scratch);
    return plan;
}

void natural_death_fine(FineCell& cell, RngStream& rng, const ModelParams& mp, GrowthPlan* plan,
                        CellAudit* audit) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        PlantList& pl = cell.plants[s];
        const SpeciesParams& sp = mp.species[s];
        std::vector<double>* inc = plan ? &plan->inc[s] : nullptr;
        if (inc && inc->size() != pl.size())
            throw std::logic_error("natural_death_fine: plan out of step with population");
        const std::size_t n = pl.size();
        std::size_t w = 0;
        double dead_mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // one uniform per plant, dead or alive, to keep draws aligned;
            // death is certain from age_max on
            const double p =
                pl.age[i] >= sp.age_max ? 1.0 : mortality_probability(pl.age[i], sp);
            if (rng.uniform() < p) {
                dead_mass += plant_biomass(pl.d[i], mp.constants);
                continue;
            }
            pl.d[w] = pl.d[i];
            pl.age[w] = pl.age[i];
            pl.seeds[w] = pl.seeds[i];
            if (inc) (*inc)[w] = (*inc)[i];
            ++w;
        }
        compact(pl, inc, w);
        cell.dead_biomass[s] += dead_mass;
        if (audit) audit->natural_dead[s] += static_cast<std::int64_t>(n - w);
    }
}

void apply_growth_fine(FineCell& cell, const GrowthPlan& plan, const ModelParams& mp) {
    const kernels::KernelTable& K = kernels::active_kernels();
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        PlantList& pl = cell.plants[s];
        if (plan.inc[s].size() != pl.size())
            throw std::logic_error("apply_growth_fine: plan out of step with population");
        K.apply_growth(pl.d.data(), plan.inc[s].data(), pl.size(), mp.species[s].d_max);
        for (std::int32_t& a : pl.age) ++a;
    }
}

void grow_plants_fine(FineCell& cell, const ModelParams& mp, double cell_area) {
    const GrowthPlan plan = compute_growth_increments(cell, mp, cell_area);
    apply_growth_fine(cell, plan, mp);
}

void germinate_fine(FineCell& cell, RngStream& rng, const ModelParams& mp, std::int64_t m,
                    CellAudit* audit) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        PlantList& pl = cell.plants[s];
        const SpeciesParams& sp = mp.species[s];
        const std::int64_t space_left =
            std::max<std::int64_t>(0, m - static_cast<std::int64_t>(pl.size()));
        std::int64_t germ = rng.binomial(cell.seed_bank[s], germination_p(sp, cell.terrain));
        germ = std::min(germ, space_left);
        for (std::int64_t i = 0; i < germ; ++i) pl.append(mp.constants.d0, 1, 0);
        cell.seed_bank[s] -= germ;
        if (audit) audit->germinated[s] += germ;
    }
}

void update_seed_bank_fine(FineCell& cell, const ModelParams& mp) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        PlantList& pl = cell.plants[s];
        const SpeciesParams& sp = mp.species[s];
        const std::int32_t output = static_cast<std::int32_t>(sp.c_seeds);
        std::int64_t total = 0;
        for (std::size_t i = 0; i < pl.size(); ++i) {
            pl.seeds[i] = pl.age[i] >= sp.age_adult ? output : 0;
            total += pl.seeds[i];
        }
        cell.seed_bank[s] = total;  // replaced, not accumulated
    }
}

double leaf_area_above_fine(const FineCell& cell, double h, const ModelParams& mp) {
    const kernels::KernelTable& K = kernels::active_kernels();
    std::vector<double> heights, la;
    double total = 0.0;
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const PlantList& pl = cell.plants[s];
        const SpeciesParams& sp = mp.species[s];
        heights.resize(pl.size());
        la.resize(pl.size());
        K.heights(pl.d.data(), pl.size(), sp.h_max, sp.hd_a, heights.data());
        K.scaled_square(pl.d.data(), pl.size(), sp.c_leaf, la.data());
        total += K.sum_above(heights.data(), la.data(), pl.size(), h);
    }
    return total;
}

void step_cell_fine(FineCell& cell, std::size_t cell_linear, std::int32_t year, bool burning,
                    std::uint64_t seed, const ModelParams& mp, double cell_area, std::int64_t m,
                    GrowthScratch& scratch, CellAudit* audit) {
    if (audit)
        for (std::size_t s = 0; s < kNumSpecies; ++s) audit->start[s] = cell.count(s);
    const std::uint64_t y = static_cast<std::uint64_t>(year);
    decay_dead_biomass(cell, mp.constants);
    {
        RngStream rs = make_stream(seed, cell_linear, y, Phase::fire);
        apply_fire_fine(cell, burning, rs, mp, audit);
    }
    // increments are frozen on the post-fire population, then survive or
    // die with their plants before being applied
    compute_growth_increments(cell, mp, cell_area, scratch.plan, scratch);
    {
        RngStream rs = make_stream(seed, cell_linear, y, Phase::natural_death);
        natural_death_fine(cell, rs, mp, &scratch.plan, audit);
    }
    apply_growth_fine(cell, scratch.plan, mp);
    {
        RngStream rs = make_stream(seed, cell_linear, y, Phase::germination);
        germinate_fine(cell, rs, mp, m, audit);
    }
    update_seed_bank_fine(cell, mp);
    if (audit)
        for (std::size_t s = 0; s < kNumSpecies; ++s) audit->end[s] = cell.count(s);
}

FineCell init_fine_cell(std::size_t cell_linear, Terrain terrain,
                        [[maybe_unused]] const ModelParams& mp, std::int64_t m,
                        double initial_avg, std::uint64_t seed) {
    FineCell cell;
    cell.terrain = terrain;
    RngStream rs = make_stream(seed, cell_linear, 0, Phase::init);
    const double lambda = initial_avg / static_cast<double>(kNumSpecies);
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        std::int64_t n = rs.poisson(lambda);
        n = std::min(n, m);
        for (std::int64_t i = 0; i < n; ++i) {
            const double d = rs.uniform(0.5, 5.0);
            const std::int32_t age = 1 + static_cast<std::int32_t>(rs.uniform_int(10));
            cell.plants[s].append(d, age, 0);
        }
    }
    return cell;
}

FineEngine::FineEngine(const Landscape& land, const ModelParams& mp, std::int64_t m,
                       double initial_avg, std::uint64_t seed)
    : land_(land), mp_(mp), m_(m), seed_(seed) {
    mp_.validate();
    if (m < 1) throw std::invalid_argument("FineEngine: m must be >= 1");
    for (std::size_t i = 0; i < land_.n_cells(); ++i) {
        if (land_.terrain[i] < 0) continue;
        cells_.push_back(init_fine_cell(i, land_.terrain_at(i), mp_, m_, initial_avg, seed_));
        cell_linear_.push_back(i);
    }
    audits_.resize(cells_.size());
}

void FineEngine::step(std::int32_t year, const FireMap& fires, int n_threads) {
    if (fires.rows != land_.rows || fires.cols != land_.cols)
        throw std::invalid_argument("FineEngine::step: fire map geometry mismatch");
    const std::size_t n = cells_.size();
    auto work = [&](std::size_t lo, std::size_t hi) {
        GrowthScratch scratch;
        for (std::size_t c = lo; c < hi; ++c) {
            audits_[c] = CellAudit{};
            step_cell_fine(cells_[c], cell_linear_[c], year, fires.at(cell_linear_[c]), seed_,
                           mp_, land_.cell_area, m_, scratch, &audits_[c]);
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

void FineEngine::step_ordered(std::int32_t year, const FireMap& fires,
                              const std::vector<std::size_t>& order) {
    if (fires.rows != land_.rows || fires.cols != land_.cols)
        throw std::invalid_argument("FineEngine::step_ordered: fire map geometry mismatch");
    GrowthScratch scratch;
    for (const std::size_t c : order) {
        audits_[c] = CellAudit{};
        step_cell_fine(cells_[c], cell_linear_[c], year, fires.at(cell_linear_[c]), seed_, mp_,
                       land_.cell_area, m_, scratch, &audits_[c]);
    }
}

double fine_cell_output(const FineCell& cell, std::size_t s, Variable v, const ModelParams& mp,
                        double cell_area) {
    const kernels::KernelTable& K = kernels::active_kernels();
    const PlantList& pl = cell.plants[s];
    switch (v) {
        case Variable::density: return static_cast<double>(pl.size());
        case Variable::basal_area: return kBaScale * K.sum_square(pl.d.data(), pl.size());
        case Variable::biomass: return mp.constants.c_b * K.sum_pow25(pl.d.data(), pl.size());
        case Variable::lai:
            return mp.species[s].c_leaf * K.sum_square(pl.d.data(), pl.size()) / cell_area;
        case Variable::seed_bank: return static_cast<double>(cell.seed_bank[s]);
        case Variable::dead_biomass: return cell.dead_biomass[s];
    }
    return 0.0;
}

AsciiRaster FineEngine::output_map(Variable v, int species) const {
    AsciiRaster r = make_raster(land_.rows, land_.cols, land_.side());
    for (std::size_t i = 0; i < r.size(); ++i)
        if (land_.terrain[i] < 0) r.nulls[i] = 1;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        double val = 0.0;
        if (species >= 0) {
            val = fine_cell_output(cells_[c], static_cast<std::size_t>(species), v, mp_,
                                   land_.cell_area);
        } else {
            for (std::size_t s = 0; s < kNumSpecies; ++s)
                val += fine_cell_output(cells_[c], s, v, mp_, land_.cell_area);
        }
        r.values[cell_linear_[c]] = val;
    }
    return r;
}

Totals FineEngine::totals() const {
    Totals t;
    for (const FineCell& cell : cells_) {
        for (std::size_t s = 0; s < kNumSpecies; ++s)
            for (const Variable v : kAllVariables)
                t[v] += fine_cell_output(cell, s, v, mp_, land_.cell_area);
    }
    if (!cells_.empty()) t[Variable::lai] /= static_cast<double>(cells_.size());
    return t;
}

std::int64_t FineEngine::state_cardinality() const {
    std::int64_t plants = 0;
    for (const FineCell& cell : cells_)
        for (std::size_t s = 0; s < kNumSpecies; ++s) plants += cell.count(s);
    return 3 * plants;
}

}  // namespace vlsim
