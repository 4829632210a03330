#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "vlsim/consistency.hpp"
#include "vlsim/domain.hpp"
#include "vlsim/fine.hpp"
#include "vlsim/fire.hpp"
#include "vlsim/kernels.hpp"
#include "vlsim/rng.hpp"

using namespace vlsim;

namespace {

constexpr double kArea = 100.0;

bool lists_equal(const PlantList& a, const PlantList& b) {
    return a.d == b.d && a.age == b.age && a.seeds == b.seeds;
}

bool cells_equal(const FineCell& a, const FineCell& b) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        if (!lists_equal(a.plants[s], b.plants[s])) return false;
        if (a.seed_bank[s] != b.seed_bank[s]) return false;
        if (a.dead_biomass[s] != b.dead_biomass[s]) return false;
    }
    return a.terrain == b.terrain;
}

FineCell busy_cell(std::uint64_t seed) {
    FineCell cell = init_fine_cell(0, Terrain::slope, default_params(), 100, 40.0, seed);
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        cell.seed_bank[s] = 400 + static_cast<std::int64_t>(s) * 37;
        cell.dead_biomass[s] = 2.5 * static_cast<double>(s + 1);
    }
    return cell;
}

Landscape one_cell_landscape() {
    Landscape land;
    land.rows = 2;
    land.cols = 2;
    land.cell_area = kArea;
    land.terrain = {1, -1, -1, -1};
    return land;
}

}  // namespace

TEST_SUITE("fine") {

TEST_CASE("fire: not burning is the identity") {
    const ModelParams mp = default_params();
    FineCell cell = busy_cell(3);
    const FineCell before = cell;
    RngStream rng = make_stream(1, 0, 1, Phase::fire);
    CellAudit audit{};
    apply_fire_fine(cell, false, rng, mp, &audit);
    CHECK(cells_equal(cell, before));
    for (std::size_t s = 0; s < kNumSpecies; ++s) CHECK(audit.fire_dead[s] == 0);
}

TEST_CASE("fire: certain kill clears the species and banks the biomass") {
    ModelParams mp = default_params();
    mp.species[0].fire_kill_frac = 1.0;
    mp.species[1].fire_kill_frac = 0.0;
    FineCell cell;
    cell.plants[0].append(10.0, 30, 0);
    cell.plants[0].append(20.0, 40, 0);
    cell.plants[1].append(5.0, 10, 0);
    cell.seed_bank[0] = 777;
    const double expect_mass =
        plant_biomass(10.0, mp.constants) + plant_biomass(20.0, mp.constants);

    RngStream rng = make_stream(1, 0, 1, Phase::fire);
    CellAudit audit{};
    apply_fire_fine(cell, true, rng, mp, &audit);
    CHECK(cell.count(0) == 0);
    CHECK(cell.count(1) == 1);  // kill fraction 0 spares it
    CHECK(cell.seed_bank[0] == 777);
    CHECK(cell.dead_biomass[0] == doctest::Approx(expect_mass).epsilon(1e-14));
    CHECK(audit.fire_dead[0] == 2);
    CHECK(audit.fire_dead[1] == 0);
}

TEST_CASE("fire: kill fraction one half behaves binomially") {
    ModelParams mp = default_params();
    mp.species[2].fire_kill_frac = 0.5;
    FineCell cell;
    for (int i = 0; i < 10000; ++i) cell.plants[2].append(0.5 + (i % 40) * 0.1, 5, 0);
    RngStream rng = make_stream(11, 0, 1, Phase::fire);
    apply_fire_fine(cell, true, rng, mp);
    const std::int64_t survivors = cell.count(2);
    CHECK(survivors > 4850);  // 3 sigma, sigma = 50
    CHECK(survivors < 5150);
}

TEST_CASE("fire: survivors keep their attributes and order") {
    ModelParams mp = default_params();
    mp.species[0].fire_kill_frac = 0.5;
    FineCell cell;
    for (int i = 0; i < 200; ++i) cell.plants[0].append(1.0 + i, 7, 3);
    RngStream rng = make_stream(5, 0, 1, Phase::fire);
    apply_fire_fine(cell, true, rng, mp);
    const PlantList& pl = cell.plants[0];
    REQUIRE(pl.size() > 0);
    REQUIRE(pl.size() < 200);
    for (std::size_t i = 1; i < pl.size(); ++i) CHECK(pl.d[i] > pl.d[i - 1]);
    for (std::size_t i = 0; i < pl.size(); ++i) {
        CHECK(pl.age[i] == 7);  // ages unchanged by fire
        CHECK(pl.seeds[i] == 3);
    }
}

TEST_CASE("natural death: zero rates spare everyone below age_max") {
    ModelParams mp = default_params();
    for (auto& sp : mp.species) {
        sp.p_b = 0.0;
        sp.p_max = 0.0;
    }
    FineCell cell = busy_cell(17);
    const FineCell before = cell;
    RngStream rng = make_stream(2, 0, 1, Phase::natural_death);
    natural_death_fine(cell, rng, mp);
    CHECK(cells_equal(cell, before));  // init ages are 1..10, far from age_max
}

TEST_CASE("natural death: age_max is certain death and the plan compacts in step") {
    ModelParams mp = default_params();
    mp.species[0].p_b = 0.0;
    mp.species[0].p_max = 0.0;
    FineCell cell;
    cell.plants[0].append(1.0, 10, 0);
    cell.plants[0].append(2.0, mp.species[0].age_max, 0);
    cell.plants[0].append(3.0, 10, 0);

    GrowthPlan plan = compute_growth_increments(cell, mp, kArea);
    const double i0 = plan.inc[0][0];
    const double i2 = plan.inc[0][2];

    RngStream rng = make_stream(3, 0, 1, Phase::natural_death);
    CellAudit audit{};
    natural_death_fine(cell, rng, mp, &plan, &audit);
    REQUIRE(cell.count(0) == 2);
    CHECK(cell.plants[0].d == std::vector<double>{1.0, 3.0});
    CHECK(plan.inc[0] == std::vector<double>{i0, i2});
    CHECK(audit.natural_dead[0] == 1);
    CHECK(cell.dead_biomass[0] ==
          doctest::Approx(plant_biomass(2.0, mp.constants)).epsilon(1e-14));
}

TEST_CASE("growth: lone plant matches the scalar factor chain") {
    const ModelParams mp = default_params();
    const SpeciesParams& sp = mp.species[0];
    FineCell cell;
    cell.plants[0].append(2.0, 5, 0);

    const GrowthPlan plan = compute_growth_increments(cell, mp, kArea);
    // identical inputs through the scalar factor helpers → identical bits
    const double ba = kBaScale * kernels::active_kernels().sum_square(cell.plants[0].d.data(), 1);
    const double want =
        growth_increment(growth_factors(ba, 0.0, 2.0, sp, mp.constants, kArea), sp, 1.0);
    CHECK(plan.inc[0][0] == want);
    // and approximately g_max·respFactor with no crowding or shade
    CHECK(plan.inc[0][0] ==
          doctest::Approx(sp.g_max * (1.0 - 2.0 / sp.d_max)).epsilon(1e-3));
}

TEST_CASE("growth: ages advance by one and the diameter cap binds") {
    ModelParams mp = default_params();
    FineCell cell;
    cell.plants[1].append(mp.species[1].d_max - 1.0, 4, 0);
    cell.plants[1].append(1.0, 9, 0);
    GrowthPlan plan;
    plan.inc[1] = {5.0, 0.25};
    apply_growth_fine(cell, plan, mp);
    CHECK(cell.plants[1].d[0] == mp.species[1].d_max);
    CHECK(cell.plants[1].d[1] == 1.25);
    CHECK(cell.plants[1].age == std::vector<std::int32_t>{5, 10});
}

TEST_CASE("leaf area above: two-plant fixture") {
    ModelParams mp = default_params();
    // species 0 plant at height 3 m with 4 m² of leaf, species 1 at 8 m with 9 m²
    mp.species[0].h_max = 20.0;
    mp.species[0].hd_a = 0.05;
    mp.species[1].h_max = 20.0;
    mp.species[1].hd_a = 0.05;
    const double d1 = -std::log(1.0 - 3.0 / 20.0) / 0.05;
    const double d2 = -std::log(1.0 - 8.0 / 20.0) / 0.05;
    mp.species[0].c_leaf = 4.0 / (d1 * d1);
    mp.species[1].c_leaf = 9.0 / (d2 * d2);

    FineCell cell;
    cell.plants[0].append(d1, 5, 0);
    cell.plants[1].append(d2, 5, 0);

    CHECK(leaf_area_above_fine(cell, 5.0, mp) == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(leaf_area_above_fine(cell, 0.0, mp) == doctest::Approx(13.0).epsilon(1e-9));
    CHECK(leaf_area_above_fine(cell, 10.0, mp) == 0.0);
}

TEST_CASE("leaf area above: equal heights never shade each other") {
    const ModelParams mp = default_params();
    FineCell cell;
    cell.plants[0].append(4.0, 5, 0);
    cell.plants[0].append(4.0, 9, 0);
    const double h = height(4.0, mp.species[0]);
    CHECK(leaf_area_above_fine(cell, h, mp) == 0.0);

    GrowthPlan plan;
    GrowthScratch scratch;
    compute_growth_increments(cell, mp, kArea, plan, scratch);
    CHECK(scratch.la_above[0][0] == 0.0);
    CHECK(scratch.la_above[0][1] == 0.0);
    CHECK(plan.inc[0][0] == plan.inc[0][1]);  // identical plants, identical growth
}

TEST_CASE("shading matches the quadratic oracle") {
    const ModelParams mp = default_params();
    RngStream rng(31);
    FineCell cell;
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        const int n = 20 + static_cast<int>(rng.uniform_int(30));
        for (int i = 0; i < n; ++i) {
            // coarse quantization manufactures exact height ties
            const double d = 0.5 + 0.25 * static_cast<double>(rng.uniform_int(30));
            cell.plants[s].append(d, 5, 0);
        }
    }

    GrowthPlan plan;
    GrowthScratch scratch;
    compute_growth_increments(cell, mp, kArea, plan, scratch);

    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        for (std::size_t i = 0; i < cell.plants[s].size(); ++i) {
            const double hi = height(cell.plants[s].d[i], mp.species[s]);
            double want = 0.0;  // every strictly taller plant, any species
            for (std::size_t t = 0; t < kNumSpecies; ++t)
                for (const double dj : cell.plants[t].d)
                    if (height(dj, mp.species[t]) > hi)
                        want += leaf_area_single(dj, mp.species[t]);
            CHECK(scratch.la_above[s][i] == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("germination: clipped by space, seedlings standardized") {
    ModelParams mp = default_params();
    mp.species[0].g_rate = 1.0;
    mp.species[0].terrain_factor = {1.0, 1.0, 1.0};
    FineCell cell;
    cell.plants[0].append(3.0, 8, 11);
    cell.plants[0].append(4.0, 9, 11);
    cell.seed_bank[0] = 5;

    RngStream rng = make_stream(4, 0, 1, Phase::germination);
    CellAudit audit{};
    germinate_fine(cell, rng, mp, 5, &audit);  // m = 5, so space for 3
    REQUIRE(cell.count(0) == 5);
    CHECK(audit.germinated[0] == 3);
    CHECK(cell.seed_bank[0] == 2);
    for (std::size_t i = 2; i < 5; ++i) {
        CHECK(cell.plants[0].d[i] == mp.constants.d0);
        CHECK(cell.plants[0].age[i] == 1);
        CHECK(cell.plants[0].seeds[i] == 0);
    }
}

TEST_CASE("germination: empty bank and full cell are no-ops") {
    ModelParams mp = default_params();
    mp.species[0].g_rate = 1.0;
    FineCell cell;
    RngStream rng = make_stream(5, 0, 1, Phase::germination);
    germinate_fine(cell, rng, mp, 10);
    CHECK(cell.count(0) == 0);  // nothing in the bank

    for (int i = 0; i < 10; ++i) cell.plants[0].append(1.0, 3, 0);
    cell.seed_bank[0] = 100000;
    RngStream rng2 = make_stream(6, 0, 1, Phase::germination);
    germinate_fine(cell, rng2, mp, 10);
    CHECK(cell.count(0) == 10);  // at capacity
    CHECK(cell.seed_bank[0] == 100000);
}

TEST_CASE("seed bank: replaced by the per-plant maturity sum") {
    ModelParams mp = default_params();
    mp.species[0].age_adult = 20;
    mp.species[0].c_seeds = 50;
    FineCell cell;
    cell.plants[0].append(5.0, 25, 0);
    cell.plants[0].append(5.0, 20, 0);  // boundary: age == age_adult counts
    cell.plants[0].append(5.0, 30, 0);
    cell.plants[0].append(5.0, 19, 0);
    cell.plants[0].append(5.0, 1, 0);
    cell.seed_bank[0] = 999999;  // stale value must be replaced, not added to

    update_seed_bank_fine(cell, mp);
    CHECK(cell.seed_bank[0] == 150);
    CHECK(cell.plants[0].seeds == std::vector<std::int32_t>{50, 50, 50, 0, 0});

    mp.species[0].c_seeds = 100;
    FineCell one;
    one.plants[0].append(5.0, 20, 0);
    update_seed_bank_fine(one, mp);
    CHECK(one.seed_bank[0] == 100);

    FineCell young;
    young.plants[0].append(5.0, 19, 0);
    young.seed_bank[0] = 7;
    update_seed_bank_fine(young, mp);
    CHECK(young.seed_bank[0] == 0);
}

TEST_CASE("step composes the phases in order") {
    const ModelParams mp = default_params();
    const std::uint64_t seed = 97;
    const std::size_t cell_idx = 5;
    const std::int32_t year = 13;
    for (const bool burning : {false, true}) {
        CAPTURE(burning);
        FineCell stepped = busy_cell(23);
        FineCell manual = stepped;

        GrowthScratch scratch;
        step_cell_fine(stepped, cell_idx, year, burning, seed, mp, kArea, 100, scratch);

        decay_dead_biomass(manual, mp.constants);
        {
            RngStream rs = make_stream(seed, cell_idx, year, Phase::fire);
            apply_fire_fine(manual, burning, rs, mp);
        }
        GrowthPlan plan = compute_growth_increments(manual, mp, kArea);
        {
            RngStream rs = make_stream(seed, cell_idx, year, Phase::natural_death);
            natural_death_fine(manual, rs, mp, &plan);
        }
        apply_growth_fine(manual, plan, mp);
        {
            RngStream rs = make_stream(seed, cell_idx, year, Phase::germination);
            germinate_fine(manual, rs, mp, 100);
        }
        update_seed_bank_fine(manual, mp);

        CHECK(cells_equal(stepped, manual));
    }
}

TEST_CASE("step is deterministic and empty cells are fixed points") {
    const ModelParams mp = default_params();
    FineCell a = busy_cell(41);
    FineCell b = a;
    GrowthScratch scratch;
    step_cell_fine(a, 2, 7, false, 123, mp, kArea, 100, scratch);
    step_cell_fine(b, 2, 7, false, 123, mp, kArea, 100, scratch);
    CHECK(cells_equal(a, b));

    FineCell empty;
    step_cell_fine(empty, 0, 1, false, 1, mp, kArea, 100, scratch);
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
        CHECK(empty.count(s) == 0);
        CHECK(empty.seed_bank[s] == 0);
    }
}

TEST_CASE("conservation and bounds hold year over year") {
    const ModelParams mp = default_params();
    FineCell cell = busy_cell(59);
    GrowthScratch scratch;
    for (std::int32_t year = 1; year <= 60; ++year) {
        const std::array<std::int64_t, kNumSpecies> before = {cell.count(0), cell.count(1),
                                                              cell.count(2), cell.count(3)};
        CellAudit audit{};
        const bool burning = year % 11 == 0;
        step_cell_fine(cell, 9, year, burning, 7, mp, kArea, 100, scratch, &audit);
        for (std::size_t s = 0; s < kNumSpecies; ++s) {
            CAPTURE(year);
            CAPTURE(s);
            CHECK(audit.start[s] == before[s]);
            CHECK(audit.end[s] == cell.count(s));
            CHECK(audit.end[s] == audit.start[s] - audit.fire_dead[s] -
                                      audit.natural_dead[s] + audit.germinated[s]);
            CHECK(cell.count(s) <= 100);
            CHECK(cell.seed_bank[s] >= 0);
            CHECK(cell.dead_biomass[s] >= 0.0);
            const PlantList& pl = cell.plants[s];
            const SpeciesParams& sp = mp.species[s];
            for (std::size_t i = 0; i < pl.size(); ++i) {
                CHECK(pl.d[i] > 0.0);
                CHECK(pl.d[i] <= sp.d_max);
                CHECK(pl.age[i] >= 1);
                CHECK(pl.age[i] <= sp.age_max);
                CHECK(pl.seeds[i] >= 0);
            }
        }
    }
}

TEST_CASE("initialization: ranges, determinism, expected density") {
    const ModelParams mp = default_params();
    CHECK(cells_equal(init_fine_cell(3, Terrain::ridge, mp, 100, 20.0, 5),
                      init_fine_cell(3, Terrain::ridge, mp, 100, 20.0, 5)));

    double total = 0.0;
    const int n_cells = 400;
    for (int c = 0; c < n_cells; ++c) {
        const FineCell cell =
            init_fine_cell(static_cast<std::size_t>(c), Terrain::slope, mp, 100, 20.0, 77);
        for (std::size_t s = 0; s < kNumSpecies; ++s) {
            total += static_cast<double>(cell.count(s));
            const PlantList& pl = cell.plants[s];
            for (std::size_t i = 0; i < pl.size(); ++i) {
                CHECK(pl.d[i] >= 0.5);
                CHECK(pl.d[i] < 5.0);
                CHECK(pl.age[i] >= 1);
                CHECK(pl.age[i] <= 10);
                CHECK(pl.seeds[i] == 0);
            }
        }
    }
    // cell total ~ Poisson(20): mean within 3σ = 3·sqrt(20/400)
    CHECK(std::fabs(total / n_cells - 20.0) < 3.0 * std::sqrt(20.0 / n_cells));

    // the m cap truncates
    const FineCell capped = init_fine_cell(0, Terrain::slope, mp, 2, 400.0, 9);
    for (std::size_t s = 0; s < kNumSpecies; ++s) CHECK(capped.count(s) <= 2);
}

TEST_CASE("engine: output maps respect nulls and species sum to totals") {
    const Landscape land = one_cell_landscape();
    const ModelParams mp = default_params();
    FineEngine eng(land, mp, 100, 20.0, 3);

    const AsciiRaster density = eng.output_map(Variable::density, -1);
    REQUIRE(density.rows == 2);
    CHECK_FALSE(density.is_null(0, 0));
    CHECK(density.is_null(0, 1));
    CHECK(density.is_null(1, 0));
    CHECK(density.is_null(1, 1));

    double by_species = 0.0;
    for (int s = 0; s < static_cast<int>(kNumSpecies); ++s)
        by_species += eng.output_map(Variable::density, s).at(0, 0);
    CHECK(density.at(0, 0) == by_species);

    const FineCell& cell = eng.cell(0);
    const double n_total = static_cast<double>(cell.count(0) + cell.count(1) + cell.count(2) +
                                               cell.count(3));
    CHECK(density.at(0, 0) == n_total);

    const Totals t = eng.totals();
    CHECK(t[Variable::density] == n_total);
    double ba = 0.0;
    for (std::size_t s = 0; s < kNumSpecies; ++s)
        ba += fine_cell_output(cell, s, Variable::basal_area, mp, kArea);
    CHECK(t[Variable::basal_area] == doctest::Approx(ba).epsilon(1e-12));

    CHECK(eng.state_cardinality() == 3 * static_cast<std::int64_t>(n_total));
}

TEST_CASE("engine: cell order and thread count cannot change the outcome") {
    Landscape land;
    land.rows = 6;
    land.cols = 7;
    land.cell_area = kArea;
    land.terrain.assign(land.n_cells(), 0);
    for (std::size_t i = 0; i < land.n_cells(); ++i)
        land.terrain[i] = static_cast<std::int8_t>(i % 4 == 3 ? -1 : i % 3);

    const ModelParams mp = default_params();
    FireRegime reg;
    reg.ignition = {0.3, 0.3, 0.3};

    FineEngine serial(land, mp, 60, 20.0, 21);
    FineEngine threaded(land, mp, 60, 20.0, 21);
    FineEngine shuffled(land, mp, 60, 20.0, 21);

    std::vector<std::size_t> order(serial.n_active());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937 gen(99);

    for (std::int32_t year = 1; year <= 6; ++year) {
        const FireMap fires = sample_fires(reg, land, year, 21);
        serial.step(year, fires, 1);
        threaded.step(year, fires, 4);
        std::shuffle(order.begin(), order.end(), gen);
        shuffled.step_ordered(year, fires, order);
        for (std::size_t c = 0; c < serial.n_active(); ++c) {
            REQUIRE(cells_equal(serial.cell(c), threaded.cell(c)));
            REQUIRE(cells_equal(serial.cell(c), shuffled.cell(c)));
        }
    }
}

TEST_CASE("engine: fire map geometry is checked") {
    const Landscape land = one_cell_landscape();
    const ModelParams mp = default_params();
    FineEngine eng(land, mp, 100, 20.0, 3);
    Landscape wrong = land;
    wrong.rows = 3;
    wrong.terrain.assign(6, 1);
    const FireMap bad = FireMap::none(wrong);
    CHECK_THROWS_AS(eng.step(1, bad), std::invalid_argument);
}

}  // TEST_SUITE
