#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "vlsim/domain.hpp"
#include "vlsim/fire.hpp"
#include "vlsim/raster.hpp"

using namespace vlsim;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    const fs::path p = fs::temp_directory_path() / "vlsim_fire_tests";
    fs::create_directories(p);
    return p;
}

Landscape grid(std::int32_t rows, std::int32_t cols) {
    Landscape land;
    land.rows = rows;
    land.cols = cols;
    land.cell_area = 100.0;
    land.terrain.assign(land.n_cells(), 1);  // all slope
    return land;
}

std::int64_t burning_count(const FireMap& fm) {
    std::int64_t n = 0;
    for (const auto b : fm.burning) n += b;
    return n;
}

}  // namespace

TEST_SUITE("fire") {

TEST_CASE("no ignition, certain ignition") {
    Landscape land = grid(20, 20);
    land.terrain[7] = -1;

    FireRegime off;
    off.ignition = {0.0, 0.0, 0.0};
    CHECK(burning_count(sample_fires(off, land, 3, 42)) == 0);

    FireRegime on;
    on.ignition = {1.0, 1.0, 1.0};
    const FireMap fm = sample_fires(on, land, 3, 42);
    CHECK(burning_count(fm) == static_cast<std::int64_t>(land.n_active()));
    CHECK_FALSE(fm.at(7));  // null cells never burn
}

TEST_CASE("ignition frequency matches the regime") {
    const Landscape land = grid(100, 100);
    FireRegime half;
    half.ignition = {0.5, 0.5, 0.5};
    const std::int64_t n = burning_count(sample_fires(half, land, 1, 2024));
    CHECK(std::llabs(n - 5000) < 150);  // 3 sigma, sigma = 50
}

TEST_CASE("terrain picks the probability") {
    // ridge-only landscape at p_ridge=1, others 0 → everything burns;
    // flip to valley terrain and nothing does
    Landscape land = grid(10, 10);
    FireRegime reg;
    reg.ignition = {1.0, 0.0, 0.0};
    for (auto& t : land.terrain) t = 0;
    CHECK(burning_count(sample_fires(reg, land, 1, 9)) == 100);
    for (auto& t : land.terrain) t = 2;
    CHECK(burning_count(sample_fires(reg, land, 1, 9)) == 0);
}

TEST_CASE("sampling is deterministic and keyed by year and seed") {
    const Landscape land = grid(30, 30);
    FireRegime reg;
    reg.ignition = {0.3, 0.3, 0.3};
    const FireMap a = sample_fires(reg, land, 5, 1234);
    const FireMap b = sample_fires(reg, land, 5, 1234);
    CHECK(a.burning == b.burning);
    CHECK(sample_fires(reg, land, 6, 1234).burning != a.burning);
    CHECK(sample_fires(reg, land, 5, 1235).burning != a.burning);
}

TEST_CASE("none() is all clear") {
    const Landscape land = grid(4, 4);
    const FireMap fm = FireMap::none(land);
    CHECK(fm.rows == 4);
    CHECK(fm.cols == 4);
    CHECK(burning_count(fm) == 0);
}

TEST_CASE("sample, write, load round-trips exactly") {
    Landscape land = grid(12, 9);
    land.terrain[30] = -1;
    land.terrain[31] = -1;
    FireRegime reg;
    reg.ignition = {0.4, 0.4, 0.4};
    const FireMap fm = sample_fires(reg, land, 7, 77);

    const fs::path p = tmp_dir() / "fires.asc";
    write_raster(fire_map_raster(fm, land), p);
    const FireMap back = load_fire_map(p, land);
    CHECK(back.burning == fm.burning);
}

TEST_CASE("threshold at one half") {
    const Landscape land = grid(1, 3);
    AsciiRaster r = make_raster(1, 3, 10.0);
    r.set(0, 0, 0.4);
    r.set(0, 1, 0.6);
    r.set(0, 2, 1.0);
    const fs::path p = tmp_dir() / "thresh.asc";
    write_raster(r, p);
    const FireMap fm = load_fire_map(p, land);
    CHECK_FALSE(fm.at(0));
    CHECK(fm.at(1));
    CHECK(fm.at(2));
}

TEST_CASE("null raster cells do not burn") {
    const Landscape land = grid(2, 2);
    AsciiRaster r = make_raster(2, 2, 10.0);
    r.set(0, 0, 1.0);
    r.set_null(0, 1);
    r.set(1, 0, 0.0);
    r.set(1, 1, 1.0);
    const fs::path p = tmp_dir() / "nulls.asc";
    write_raster(r, p);
    const FireMap fm = load_fire_map(p, land);
    CHECK(fm.at(0));
    CHECK_FALSE(fm.at(1));
    CHECK_FALSE(fm.at(2));
    CHECK(fm.at(3));
}

TEST_CASE("geometry mismatch is rejected") {
    const Landscape land = grid(2, 2);
    const fs::path p = tmp_dir() / "wrong_shape.asc";
    write_raster(make_raster(3, 3, 10.0), p);
    try {
        load_fire_map(p, land);
        FAIL("expected geometry error");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("3") != std::string::npos);
        CHECK(what.find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_fire_map(tmp_dir() / "absent.asc", land), std::runtime_error);
}

}  // TEST_SUITE
