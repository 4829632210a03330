#pragma once

// Lane abstraction shared by the scalar reference kernels and the SIMD
// variants. Every kernel is written once as a sequence of lane ops; the
// scalar and vector instantiations therefore execute the exact same IEEE
// operations in the exact same order, which is what makes the runtime
// variants bit-identical (and equivalence-testable with ==, not tolerances).
//
// exp_batch() is a Cephes-style exp(x) with explicit range reduction and a
// rational minimax kernel. It never touches libm, so results do not depend
// on the host's math library. Out-of-range behavior: x <= -708 -> 0,
// x >= 709 -> +inf.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>

#if defined(__AVX2__)
#include <immintrin.h>
#endif
#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace vlsim::fastmath {

struct ScalarLane {
    using batch = double;
    using mask = bool;
    static constexpr std::size_t width = 1;

    static batch splat(double v) { return v; }
    static batch load(const double* p) { return *p; }
    static void store(double* p, batch v) { *p = v; }
    static batch add(batch a, batch b) { return a + b; }
    static batch sub(batch a, batch b) { return a - b; }
    static batch mul(batch a, batch b) { return a * b; }
    static batch div(batch a, batch b) { return a / b; }
    static batch neg(batch a) { return -a; }
    static batch abs(batch a) { return std::fabs(a); }
    static batch mul_add(batch a, batch b, batch c) { return std::fma(a, b, c); }
    static batch floor_(batch a) { return std::floor(a); }
    static batch sqrt_(batch a) { return std::sqrt(a); }
    static batch min_(batch a, batch b) { return b < a ? b : a; }
    static batch max_(batch a, batch b) { return a < b ? b : a; }
    static mask cmp_gt(batch a, batch b) { return a > b; }
    static mask cmp_lt(batch a, batch b) { return a < b; }
    static mask cmp_ge(batch a, batch b) { return a >= b; }
    static batch select(mask m, batch a, batch b) { return m ? a : b; }

    // 2^n for an integer-valued double n in [-1022, 1023].
    static batch pow2i(batch n) {
        const auto i = static_cast<std::int64_t>(n);
        return std::bit_cast<double>(static_cast<std::uint64_t>(i + 1023) << 52);
    }
};

#if defined(__AVX2__)
struct Avx2Lane {
    using batch = __m256d;
    using mask = __m256d;
    static constexpr std::size_t width = 4;

    static batch splat(double v) { return _mm256_set1_pd(v); }
    static batch load(const double* p) { return _mm256_loadu_pd(p); }
    static void store(double* p, batch v) { _mm256_storeu_pd(p, v); }
    static batch add(batch a, batch b) { return _mm256_add_pd(a, b); }
    static batch sub(batch a, batch b) { return _mm256_sub_pd(a, b); }
    static batch mul(batch a, batch b) { return _mm256_mul_pd(a, b); }
    static batch div(batch a, batch b) { return _mm256_div_pd(a, b); }
    static batch neg(batch a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }
    static batch abs(batch a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }
    static batch mul_add(batch a, batch b, batch c) { return _mm256_fmadd_pd(a, b, c); }
    static batch floor_(batch a) { return _mm256_floor_pd(a); }
    static batch sqrt_(batch a) { return _mm256_sqrt_pd(a); }
    static batch min_(batch a, batch b) { return _mm256_min_pd(a, b); }
    static batch max_(batch a, batch b) { return _mm256_max_pd(a, b); }
    static mask cmp_gt(batch a, batch b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
    static mask cmp_lt(batch a, batch b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
    static mask cmp_ge(batch a, batch b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
    static batch select(mask m, batch a, batch b) { return _mm256_blendv_pd(b, a, m); }

    static batch pow2i(batch n) {
        // double -> int64 via the 1.5*2^52 shifter (exact for |n| < 2^51).
        const __m256d magic = _mm256_set1_pd(0x1.8p52);
        const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                            _mm256_castpd_si256(magic));
        const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
        return _mm256_castsi256_pd(bits);
    }
};
#endif  // __AVX2__

#if defined(__aarch64__)
struct NeonLane {
    using batch = float64x2_t;
    using mask = uint64x2_t;
    static constexpr std::size_t width = 2;

    static batch splat(double v) { return vdupq_n_f64(v); }
    static batch load(const double* p) { return vld1q_f64(p); }
    static void store(double* p, batch v) { vst1q_f64(p, v); }
    static batch add(batch a, batch b) { return vaddq_f64(a, b); }
    static batch sub(batch a, batch b) { return vsubq_f64(a, b); }
    static batch mul(batch a, batch b) { return vmulq_f64(a, b); }
    static batch div(batch a, batch b) { return vdivq_f64(a, b); }
    static batch neg(batch a) { return vnegq_f64(a); }
    static batch abs(batch a) { return vabsq_f64(a); }
    static batch mul_add(batch a, batch b, batch c) { return vfmaq_f64(c, a, b); }
    static batch floor_(batch a) { return vrndmq_f64(a); }
    static batch sqrt_(batch a) { return vsqrtq_f64(a); }
    static batch min_(batch a, batch b) { return vminq_f64(a, b); }
    static batch max_(batch a, batch b) { return vmaxq_f64(a, b); }
    static mask cmp_gt(batch a, batch b) { return vcgtq_f64(a, b); }
    static mask cmp_lt(batch a, batch b) { return vcltq_f64(a, b); }
    static mask cmp_ge(batch a, batch b) { return vcgeq_f64(a, b); }
    static batch select(mask m, batch a, batch b) { return vbslq_f64(m, a, b); }

    static batch pow2i(batch n) {
        const float64x2_t magic = vdupq_n_f64(0x1.8p52);
        const int64x2_t ni = vsubq_s64(vreinterpretq_s64_f64(vaddq_f64(n, magic)),
                                       vreinterpretq_s64_f64(magic));
        const int64x2_t bits = vshlq_n_s64(vaddq_s64(ni, vdupq_n_s64(1023)), 52);
        return vreinterpretq_f64_s64(bits);
    }
};
#endif  // __aarch64__

// exp(x), identical operation sequence in every lane type.
template <class L>
inline typename L::batch exp_batch(typename L::batch x) {
    using b = typename L::batch;
    const b log2e = L::splat(1.4426950408889634073599);
    const b half = L::splat(0.5);
    const b ln2_hi = L::splat(6.93145751953125e-1);
    const b ln2_lo = L::splat(1.42860682030941723212e-6);

    const b n = L::floor_(L::mul_add(x, log2e, half));
    b r = L::sub(x, L::mul(n, ln2_hi));
    r = L::sub(r, L::mul(n, ln2_lo));

    const b rr = L::mul(r, r);
    b p = L::splat(1.26177193074810590878e-4);
    p = L::mul_add(p, rr, L::splat(3.02994407707441961300e-2));
    p = L::mul_add(p, rr, L::splat(9.99999999999999999910e-1));
    const b px = L::mul(r, p);

    b q = L::splat(3.00198505138664455042e-6);
    q = L::mul_add(q, rr, L::splat(2.52448340349684104192e-3));
    q = L::mul_add(q, rr, L::splat(2.27265548208155028766e-1));
    q = L::mul_add(q, rr, L::splat(2.0));

    b e = L::div(px, L::sub(q, px));
    e = L::mul_add(e, L::splat(2.0), L::splat(1.0));
    e = L::mul(e, L::pow2i(n));

    e = L::select(L::cmp_lt(x, L::splat(-708.0)), L::splat(0.0), e);
    e = L::select(L::cmp_gt(x, L::splat(709.0)),
                  L::splat(std::numeric_limits<double>::infinity()), e);
    return e;
}

inline double exp(double x) { return exp_batch<ScalarLane>(x); }

}  // namespace vlsim::fastmath
