#include "vlsim/consistency.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "vlsim/rng.hpp"

namespace vlsim {

CoarseCell abstraction_map(const FineCell& cell) {
    CoarseCell out;
    out.terrain = cell.terrain;
    out.dead_biomass = cell.dead_biomass;
    for (std::size_t s = 0; s < kNumSpecies; ++s)
        out.cohorts[s] = abstract_cohort(cell.plants[s], cell.seed_bank[s]);
    return out;
}

const char* consistency_phase_name(ConsistencyPhase ph) {
    switch (ph) {
        case ConsistencyPhase::growth: return "growth";
        case ConsistencyPhase::fire: return "fire";
        case ConsistencyPhase::natural_death: return "natural-death";
        case ConsistencyPhase::germination: return "germination";
        case ConsistencyPhase::seed_bank: return "seed-bank";
    }
    return "?";
}

double ConsistencyField::combined_se() const {
    return std::sqrt(fine_se * fine_se + coarse_se * coarse_se);
}

namespace {

constexpr double kEps = 1e-9;

bool phase_is_deterministic(ConsistencyPhase ph) {
    return ph == ConsistencyPhase::growth || ph == ConsistencyPhase::seed_bank;
}

// Welford accumulator for one scalar across trials.
struct Moments {
    double mean = 0.0;
    double m2 = 0.0;
    std::int64_t count = 0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }
    // standard error of the mean
    double se() const {
        if (count < 2) return 0.0;
        const double var = m2 / static_cast<double>(count - 1);
        return std::sqrt(var / static_cast<double>(count));
    }
};

struct CohortMoments {
    Moments n, d_ave, age_ave, seed_bank;
};

void observe(std::array<CohortMoments, kNumSpecies>& acc, const CoarseCell& cc) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const Cohort& c = cc.cohorts[s];
        acc[s].n.add(static_cast<double>(c.n));
        acc[s].d_ave.add(c.d_ave);
        acc[s].age_ave.add(c.age_ave);
        acc[s].seed_bank.add(static_cast<double>(c.seed_bank));
    }
}

void run_fine_phase(FineCell& cell, ConsistencyPhase ph, RngStream& rng, const ModelParams& mp,
                    double cell_area, std::int64_t m) {
    switch (ph) {
        case ConsistencyPhase::growth: grow_plants_fine(cell, mp, cell_area); return;
        case ConsistencyPhase::fire: apply_fire_fine(cell, true, rng, mp); return;
        case ConsistencyPhase::natural_death: natural_death_fine(cell, rng, mp); return;
        case ConsistencyPhase::germination: germinate_fine(cell, rng, mp, m); return;
        case ConsistencyPhase::seed_bank: update_seed_bank_fine(cell, mp); return;
    }
}

void run_coarse_phase(CoarseCell& cell, ConsistencyPhase ph, RngStream& rng,
                      const ModelParams& mp, double cell_area, std::int64_t m) {
    switch (ph) {
        case ConsistencyPhase::growth: grow_cohorts(cell, mp, cell_area); return;
        case ConsistencyPhase::fire: apply_fire_coarse(cell, true, rng, mp); return;
        case ConsistencyPhase::natural_death: natural_death_coarse(cell, rng, mp); return;
        case ConsistencyPhase::germination: germinate_coarse(cell, rng, mp, m); return;
        case ConsistencyPhase::seed_bank: update_seed_bank_coarse(cell, mp); return;
    }
}

ConsistencyField finish(const Moments& fine, const Moments& coarse) {
    ConsistencyField f;
    f.fine_mean = fine.mean;
    f.coarse_mean = coarse.mean;
    f.fine_se = fine.se();
    f.coarse_se = coarse.se();
    const double denom =
        std::max(std::max(std::fabs(f.fine_mean), std::fabs(f.coarse_mean)), kEps);
    f.rel_diff = std::fabs(f.fine_mean - f.coarse_mean) / denom;
    return f;
}

}  // namespace

ConsistencyRecord one_step_consistency(const FineCell& cell, ConsistencyPhase phase,
                                       const ModelParams& mp, double cell_area, std::int64_t m,
                                       int n_trials, std::uint64_t seed) {
    if (n_trials < 1) throw std::invalid_argument("one_step_consistency: n_trials must be >= 1");
    if (phase_is_deterministic(phase)) n_trials = 1;

    const CoarseCell coarse0 = abstraction_map(cell);
    std::array<CohortMoments, kNumSpecies> fine_acc, coarse_acc;
    for (int t = 0; t < n_trials; ++t) {
        const std::uint64_t trial = static_cast<std::uint64_t>(t);
        FineCell f = cell;
        {
            RngStream rs = make_stream(seed, 0, trial, Phase::consistency_fine);
            run_fine_phase(f, phase, rs, mp, cell_area, m);
        }
        observe(fine_acc, abstraction_map(f));

        CoarseCell c = coarse0;
        {
            RngStream rs = make_stream(seed, 0, trial, Phase::consistency_coarse);
            run_coarse_phase(c, phase, rs, mp, cell_area, m);
        }
        observe(coarse_acc, c);
    }

    ConsistencyRecord rec;
    rec.phase = phase;
    rec.trials = n_trials;
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        SpeciesConsistency& sc = rec.species[s];
        sc.n = finish(fine_acc[s].n, coarse_acc[s].n);
        sc.d_ave = finish(fine_acc[s].d_ave, coarse_acc[s].d_ave);
        sc.age_ave = finish(fine_acc[s].age_ave, coarse_acc[s].age_ave);
        sc.seed_bank = finish(fine_acc[s].seed_bank, coarse_acc[s].seed_bank);
        for (const ConsistencyField* f : {&sc.n, &sc.d_ave, &sc.age_ave, &sc.seed_bank})
            rec.max_rel_diff = std::max(rec.max_rel_diff, f->rel_diff);
    }
    return rec;
}

std::string ConsistencyRecord::to_string() const {
    std::string out = std::string("phase ") + consistency_phase_name(phase) + ", trials " +
                      std::to_string(trials) + "\n";
    char line[256];
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const SpeciesConsistency& sc = species[s];
        const struct {
            const char* name;
            const ConsistencyField* f;
        } rows[] = {{"n", &sc.n},
                    {"d_ave", &sc.d_ave},
                    {"age_ave", &sc.age_ave},
                    {"seed_bank", &sc.seed_bank}};
        for (const auto& row : rows) {
            std::snprintf(line, sizeof line,
                          "  species %zu %-9s fine %.6g (se %.3g)  coarse %.6g (se %.3g)  rel %.3g\n",
                          s, row.name, row.f->fine_mean, row.f->fine_se, row.f->coarse_mean,
                          row.f->coarse_se, row.f->rel_diff);
            out += line;
        }
    }
    char tail[64];
    std::snprintf(tail, sizeof tail, "  max rel diff %.3g\n", max_rel_diff);
    out += tail;
    return out;
}

}  // namespace vlsim
