#pragma once

#include <filesystem>

#include "vlsim/domain.hpp"

namespace vlsim {

// Parses an INI-style parameter file (schema in docs/formats.md): four
// [species <label>] sections in index order plus [fire_regime] and
// [constants]. Every key is required; unknown or duplicate keys, malformed
// values, and invariant violations all throw std::runtime_error naming the
// offending line or key.
ModelParams read_params(const std::filesystem::path& path);

// Writes `mp` in the same schema; read_params(write_params(mp)) == mp.
void write_params(const ModelParams& mp, const std::filesystem::path& path);

}  // namespace vlsim
