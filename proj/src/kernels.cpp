#include "vlsim/kernels.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>

#include "kernels_impl.hpp"

namespace vlsim::kernels {

const KernelTable* avx2_kernels() {
#if defined(__x86_64__) && defined(__GNUC__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return detail::avx2_table();
#endif
    return nullptr;
}

const KernelTable* neon_kernels() {
    // NEON is baseline on aarch64, so compiled-in implies runnable.
    return detail::neon_table();
}

std::vector<const KernelTable*> available_kernels() {
    std::vector<const KernelTable*> out{&scalar_kernels()};
    if (const KernelTable* t = avx2_kernels()) out.push_back(t);
    if (const KernelTable* t = neon_kernels()) out.push_back(t);
    return out;
}

namespace {

const KernelTable* resolve(std::string_view name) {
    if (name == "scalar") return &scalar_kernels();
    if (name == "avx2") return avx2_kernels();
    if (name == "neon") return neon_kernels();
    if (name == "auto") {
        if (const KernelTable* t = avx2_kernels()) return t;
        if (const KernelTable* t = neon_kernels()) return t;
        return &scalar_kernels();
    }
    return nullptr;
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("VLSIM_KERNELS")) {
        if (const KernelTable* t = resolve(env)) return t;
        std::fprintf(stderr, "warning: VLSIM_KERNELS=%s not available, using auto selection\n",
                     env);
    }
    return resolve("auto");
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& active_kernels() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        // Benign race: concurrent first calls resolve to the same table.
        t = initial_table();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

bool set_active_kernels(std::string_view name) {
    const KernelTable* t = resolve(name);
    if (t == nullptr) return false;
    g_active.store(t, std::memory_order_release);
    return true;
}

}  // namespace vlsim::kernels
