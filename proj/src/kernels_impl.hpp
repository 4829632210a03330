#pragma once

// Generic kernel bodies, instantiated once per lane type (scalar / AVX2 /
// NEON). The semantics are defined in terms of four virtual lanes:
// element i of each 4-element block belongs to virtual lane i, reductions
// keep one compensated accumulator per virtual lane, and the four lanes
// are merged in index order at the end. A lane type of width W covers a
// block with 4/W batches, so every variant performs the same IEEE
// operations in the same order and results match bit for bit.

#include <cstddef>

#include "vlsim/fastmath.hpp"
#include "vlsim/kernels.hpp"

namespace vlsim::kernels::detail {

template <class L>
struct Quad {
    static constexpr std::size_t kBatches = 4 / L::width;
    using batch = typename L::batch;
    batch v[kBatches];

    static Quad splat(double x) {
        Quad q;
        for (std::size_t b = 0; b < kBatches; ++b) q.v[b] = L::splat(x);
        return q;
    }
    static Quad load(const double* p) {
        Quad q;
        for (std::size_t b = 0; b < kBatches; ++b) q.v[b] = L::load(p + b * L::width);
        return q;
    }
    void store(double* p) const {
        for (std::size_t b = 0; b < kBatches; ++b) L::store(p + b * L::width, v[b]);
    }
};

#define VLSIM_QUAD_BINOP(fn)                                      \
    template <class L>                                            \
    inline Quad<L> fn(const Quad<L>& a, const Quad<L>& b) {       \
        Quad<L> r;                                                \
        for (std::size_t i = 0; i < Quad<L>::kBatches; ++i)       \
            r.v[i] = L::fn(a.v[i], b.v[i]);                       \
        return r;                                                 \
    }

VLSIM_QUAD_BINOP(add)
VLSIM_QUAD_BINOP(sub)
VLSIM_QUAD_BINOP(mul)
VLSIM_QUAD_BINOP(div)
VLSIM_QUAD_BINOP(min_)
VLSIM_QUAD_BINOP(max_)
#undef VLSIM_QUAD_BINOP

template <class L>
inline Quad<L> qexp(const Quad<L>& a) {
    Quad<L> r;
    for (std::size_t i = 0; i < Quad<L>::kBatches; ++i)
        r.v[i] = fastmath::exp_batch<L>(a.v[i]);
    return r;
}

// One branchless Neumaier accumulation step per virtual lane.
template <class L>
inline void accumulate(Quad<L>& s, Quad<L>& c, const Quad<L>& x) {
    for (std::size_t i = 0; i < Quad<L>::kBatches; ++i) {
        const auto t = L::add(s.v[i], x.v[i]);
        const auto big = L::add(L::sub(s.v[i], t), x.v[i]);
        const auto small = L::add(L::sub(x.v[i], t), s.v[i]);
        const auto corr = L::select(L::cmp_ge(L::abs(s.v[i]), L::abs(x.v[i])), big, small);
        c.v[i] = L::add(c.v[i], corr);
        s.v[i] = t;
    }
}

inline void accumulate_scalar(double& s, double& c, double x) {
    using S = fastmath::ScalarLane;
    const double t = S::add(s, x);
    const double big = S::add(S::sub(s, t), x);
    const double small = S::add(S::sub(x, t), s);
    c = S::add(c, S::select(S::cmp_ge(S::abs(s), S::abs(x)), big, small));
    s = t;
}

// Tail elements feed virtual lanes 0.. in order; lanes then merge 0..3.
template <class L, class TailFn>
inline double finish_reduction(Quad<L>& s, Quad<L>& c, std::size_t tail_count, TailFn&& tail_value) {
    double sl[4], cl[4];
    s.store(sl);
    c.store(cl);
    for (std::size_t j = 0; j < tail_count; ++j) accumulate_scalar(sl[j], cl[j], tail_value(j));
    double acc = 0.0, comp = 0.0;
    for (int k = 0; k < 4; ++k) {
        accumulate_scalar(acc, comp, sl[k]);
        comp += cl[k];
    }
    return acc + comp;
}

// ---- elementwise kernels ----

template <class L>
void heights_impl(const double* d, std::size_t n, double h_max, double hd_a, double* out) {
    using S = fastmath::ScalarLane;
    const auto vh = Quad<L>::splat(h_max);
    const auto va = Quad<L>::splat(-hd_a);
    const auto one = Quad<L>::splat(1.0);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto x = Quad<L>::load(d + 4 * i);
        const auto e = qexp<L>(mul(va, x));
        mul(vh, sub(one, e)).store(out + 4 * i);
    }
    for (std::size_t i = 4 * nq; i < n; ++i) {
        const double e = fastmath::exp_batch<S>(S::mul(-hd_a, d[i]));
        out[i] = S::mul(h_max, S::sub(1.0, e));
    }
}

template <class L>
void scaled_square_impl(const double* d, std::size_t n, double c, double* out) {
    using S = fastmath::ScalarLane;
    const auto vc = Quad<L>::splat(c);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto x = Quad<L>::load(d + 4 * i);
        mul(vc, mul(x, x)).store(out + 4 * i);
    }
    for (std::size_t i = 4 * nq; i < n; ++i) out[i] = S::mul(c, S::mul(d[i], d[i]));
}

template <class L>
void growth_increments_impl(const double* d, const double* la_above, std::size_t n,
                            const GrowthTerms& t, double* out) {
    using S = fastmath::ScalarLane;
    const auto vbase = Quad<L>::splat(t.base);
    const auto vshade = Quad<L>::splat(t.shade_scale);
    const auto vdmax = Quad<L>::splat(t.d_max);
    const auto vtf = Quad<L>::splat(t.terrain_factor);
    const auto one = Quad<L>::splat(1.0);
    const auto zero = Quad<L>::splat(0.0);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto light = qexp<L>(mul(vshade, Quad<L>::load(la_above + 4 * i)));
        const auto resp = max_(zero, sub(one, div(Quad<L>::load(d + 4 * i), vdmax)));
        mul(mul(mul(vbase, light), resp), vtf).store(out + 4 * i);
    }
    for (std::size_t i = 4 * nq; i < n; ++i) {
        const double light = fastmath::exp_batch<S>(S::mul(t.shade_scale, la_above[i]));
        const double resp = S::max_(0.0, S::sub(1.0, S::div(d[i], t.d_max)));
        out[i] = S::mul(S::mul(S::mul(t.base, light), resp), t.terrain_factor);
    }
}

template <class L>
void apply_growth_impl(double* d, const double* inc, std::size_t n, double d_max) {
    using S = fastmath::ScalarLane;
    const auto vmax = Quad<L>::splat(d_max);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i)
        min_(add(Quad<L>::load(d + 4 * i), Quad<L>::load(inc + 4 * i)), vmax).store(d + 4 * i);
    for (std::size_t i = 4 * nq; i < n; ++i) d[i] = S::min_(S::add(d[i], inc[i]), d_max);
}

// ---- reductions ----

template <class L>
double sum_impl(const double* x, std::size_t n) {
    auto s = Quad<L>::splat(0.0), c = Quad<L>::splat(0.0);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i) accumulate<L>(s, c, Quad<L>::load(x + 4 * i));
    return finish_reduction<L>(s, c, n - 4 * nq, [&](std::size_t j) { return x[4 * nq + j]; });
}

template <class L>
double sum_square_impl(const double* x, std::size_t n) {
    using S = fastmath::ScalarLane;
    auto s = Quad<L>::splat(0.0), c = Quad<L>::splat(0.0);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto v = Quad<L>::load(x + 4 * i);
        accumulate<L>(s, c, mul(v, v));
    }
    return finish_reduction<L>(s, c, n - 4 * nq, [&](std::size_t j) {
        const double v = x[4 * nq + j];
        return S::mul(v, v);
    });
}

template <class L>
double sum_pow25_impl(const double* x, std::size_t n) {
    using S = fastmath::ScalarLane;
    auto s = Quad<L>::splat(0.0), c = Quad<L>::splat(0.0);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto v = Quad<L>::load(x + 4 * i);
        Quad<L> sq;
        for (std::size_t b = 0; b < Quad<L>::kBatches; ++b) sq.v[b] = L::sqrt_(v.v[b]);
        accumulate<L>(s, c, mul(mul(v, v), sq));
    }
    return finish_reduction<L>(s, c, n - 4 * nq, [&](std::size_t j) {
        const double v = x[4 * nq + j];
        return S::mul(S::mul(v, v), S::sqrt_(v));
    });
}

template <class L>
double sum_above_impl(const double* key, const double* val, std::size_t n, double threshold) {
    using S = fastmath::ScalarLane;
    auto s = Quad<L>::splat(0.0), c = Quad<L>::splat(0.0);
    const auto vt = Quad<L>::splat(threshold);
    const auto zero = Quad<L>::splat(0.0);
    const std::size_t nq = n / 4;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto k = Quad<L>::load(key + 4 * i);
        const auto v = Quad<L>::load(val + 4 * i);
        Quad<L> masked;
        for (std::size_t b = 0; b < Quad<L>::kBatches; ++b)
            masked.v[b] = L::select(L::cmp_gt(k.v[b], vt.v[b]), v.v[b], zero.v[b]);
        accumulate<L>(s, c, masked);
    }
    return finish_reduction<L>(s, c, n - 4 * nq, [&](std::size_t j) {
        const std::size_t i = 4 * nq + j;
        return S::select(S::cmp_gt(key[i], threshold), val[i], 0.0);
    });
}

template <class L>
constexpr KernelTable make_table(const char* name) {
    return KernelTable{
        name,
        &heights_impl<L>,
        &scaled_square_impl<L>,
        &sum_impl<L>,
        &sum_square_impl<L>,
        &sum_pow25_impl<L>,
        &sum_above_impl<L>,
        &growth_increments_impl<L>,
        &apply_growth_impl<L>,
    };
}

// Defined in the per-variant translation units; null when the variant is
// not compiled in. The public accessors in kernels.cpp add the CPU check.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace vlsim::kernels::detail
