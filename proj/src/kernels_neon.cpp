#include "kernels_impl.hpp"

namespace vlsim::kernels::detail {

#ifdef __aarch64__
const KernelTable* neon_table() {
    static const KernelTable table = make_table<fastmath::NeonLane>("neon");
    return &table;
}
#else
const KernelTable* neon_table() { return nullptr; }
#endif

}  // namespace vlsim::kernels::detail
