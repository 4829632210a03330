#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vlsim/domain.hpp"
#include "vlsim/raster.hpp"

namespace vlsim {

// Which cells burn in one year. Null cells never burn.
struct FireMap {
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    std::vector<std::uint8_t> burning;  // row-major, 0/1

    bool at(std::size_t linear) const { return burning[linear] != 0; }
    static FireMap none(const Landscape& land);
};

// One independent Bernoulli(ignition[terrain]) draw per active cell, from the
// (seed, cell, year) fire stream. Cell order and thread count cannot change
// the result because each cell has its own stream.
FireMap sample_fires(const FireRegime& regime, const Landscape& land, std::int32_t year,
                     std::uint64_t seed);

// Reads a raster of burn flags: values > 0.5 burn, nulls do not. Throws
// std::runtime_error if the raster geometry does not match the landscape.
FireMap load_fire_map(const std::filesystem::path& path, const Landscape& land);

// 0/1 raster of the map, null where the landscape is null; load_fire_map
// of the written raster reproduces the map exactly.
AsciiRaster fire_map_raster(const FireMap& fm, const Landscape& land);

}  // namespace vlsim
