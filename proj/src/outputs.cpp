#include "vlsim/outputs.hpp"

#include <algorithm>
#include <cctype>

namespace vlsim {

const char* variable_name(Variable v) {
    switch (v) {
        case Variable::density: return "density";
        case Variable::basal_area: return "basal_area";
        case Variable::biomass: return "biomass";
        case Variable::lai: return "lai";
        case Variable::seed_bank: return "seed_bank";
        case Variable::dead_biomass: return "dead_biomass";
    }
    return "?";
}

std::string species_label(const ModelParams& mp, int s) {
    if (s < 0) return "total";
    std::string label = mp.species[static_cast<std::size_t>(s)].type.label;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return label;
}

}  // namespace vlsim
