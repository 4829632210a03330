#include "kernels_impl.hpp"

namespace vlsim::kernels {

const KernelTable& scalar_kernels() {
    static const KernelTable table = detail::make_table<fastmath::ScalarLane>("scalar");
    return table;
}

}  // namespace vlsim::kernels
