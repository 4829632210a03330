#include "vlsim/fire.hpp"

#include <stdexcept>
#include <string>

#include "vlsim/raster.hpp"
#include "vlsim/rng.hpp"

namespace vlsim {

FireMap FireMap::none(const Landscape& land) {
    FireMap fm;
    fm.rows = land.rows;
    fm.cols = land.cols;
    fm.burning.assign(land.n_cells(), 0);
    return fm;
}

FireMap sample_fires(const FireRegime& regime, const Landscape& land, std::int32_t year,
                     std::uint64_t seed) {
    FireMap fm = FireMap::none(land);
    for (std::size_t i = 0; i < land.n_cells(); ++i) {
        if (land.terrain[i] < 0) continue;
        RngStream rs = make_stream(seed, i, year, Phase::fire_gen);
        const Terrain t = static_cast<Terrain>(land.terrain[i]);
        fm.burning[i] = rs.bernoulli(regime.p(t)) ? 1 : 0;
    }
    return fm;
}

FireMap load_fire_map(const std::filesystem::path& path, const Landscape& land) {
    const AsciiRaster r = read_raster(path);
    if (r.rows != land.rows || r.cols != land.cols)
        throw std::runtime_error(path.string() + ": fire map is " + std::to_string(r.rows) + "x" +
                                 std::to_string(r.cols) + ", landscape is " +
                                 std::to_string(land.rows) + "x" + std::to_string(land.cols));
    FireMap fm = FireMap::none(land);
    for (std::size_t i = 0; i < fm.burning.size(); ++i) {
        if (r.nulls[i]) continue;
        fm.burning[i] = r.values[i] > 0.5 ? 1 : 0;
    }
    return fm;
}

AsciiRaster fire_map_raster(const FireMap& fm, const Landscape& land) {
    AsciiRaster r = make_raster(land.rows, land.cols, land.side());
    for (std::size_t i = 0; i < land.n_cells(); ++i) {
        if (land.terrain[i] < 0)
            r.nulls[i] = 1;
        else
            r.values[i] = fm.burning[i] ? 1.0 : 0.0;
    }
    return r;
}

}  // namespace vlsim
