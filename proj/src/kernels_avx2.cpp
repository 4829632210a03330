// Translation unit compiled with -mavx2 -mfma on x86-64; see src/CMakeLists.txt.
// The runtime CPU check lives in kernels.cpp, which is compiled without
// those flags, so no AVX2 instruction runs before the check passes.
#include "kernels_impl.hpp"

namespace vlsim::kernels::detail {

#ifdef __AVX2__
const KernelTable* avx2_table() {
    static const KernelTable table = make_table<fastmath::Avx2Lane>("avx2");
    return &table;
}
#else
const KernelTable* avx2_table() { return nullptr; }
#endif

}  // namespace vlsim::kernels::detail
