#pragma once

// Data-parallel inner loops of the per-plant engine: heights, leaf areas,
// area reductions and shading sums over plant attribute arrays.
//
// Each kernel exists as a scalar reference implementation plus SIMD
// variants (AVX2 on x86-64, NEON on aarch64) selected at runtime. All
// variants implement the same virtual-4-lane semantics (see
// kernels_impl.hpp), so for a given input every variant returns
// bit-identical output; the equivalence tests assert that with exact
// comparison. Reductions are compensated (Neumaier) per virtual lane.

#include <cstddef>
#include <string_view>
#include <vector>

namespace vlsim::kernels {

// Per-cell constants for the growth-increment kernel:
//   inc[i] = ((base * exp(shade_scale * la_above[i])) * max(0, 1 - d[i]/d_max))
//            * terrain_factor
// where base = g_max * spaceFactor and shade_scale = -k_shade / cell_area.
struct GrowthTerms {
    double base = 0.0;
    double shade_scale = 0.0;
    double d_max = 1.0;
    double terrain_factor = 1.0;
};

struct KernelTable {
    const char* name;
    // out[i] = h_max * (1 - exp(-hd_a * d[i]))
    void (*heights)(const double* d, std::size_t n, double h_max, double hd_a, double* out);
    // out[i] = c * d[i]^2
    void (*scaled_square)(const double* d, std::size_t n, double c, double* out);
    double (*sum)(const double* x, std::size_t n);
    double (*sum_square)(const double* x, std::size_t n);
    // sum of x^2 * sqrt(x); biomass allometry
    double (*sum_pow25)(const double* x, std::size_t n);
    // sum of val[i] over elements with key[i] > threshold (strict)
    double (*sum_above)(const double* key, const double* val, std::size_t n, double threshold);
    void (*growth_increments)(const double* d, const double* la_above, std::size_t n,
                              const GrowthTerms& t, double* out);
    // d[i] = min(d[i] + inc[i], d_max)
    void (*apply_growth)(double* d, const double* inc, std::size_t n, double d_max);
};

const KernelTable& scalar_kernels();
const KernelTable* avx2_kernels();  // nullptr when unsupported by build or CPU
const KernelTable* neon_kernels();

// All usable tables on this machine; scalar first.
std::vector<const KernelTable*> available_kernels();

// The table engines use. Default: best available, overridable with the
// VLSIM_KERNELS environment variable or set_active_kernels().
const KernelTable& active_kernels();
bool set_active_kernels(std::string_view name);  // "auto", "scalar", "avx2", "neon"

}  // namespace vlsim::kernels
