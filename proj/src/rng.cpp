#include "vlsim/rng.hpp"

#include <cmath>
#include <cstdlib>

namespace vlsim {
namespace {

// splitmix64 finalizer, used here as the key-mixing function
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream make_stream(std::uint64_t seed, std::uint64_t cell, std::uint64_t year, Phase phase) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (cell + 0xbf58476d1ce4e5b9ULL));
    h = mix64(h ^ (year + 0x94d049bb133111ebULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(phase) + 0x2545f4914f6cdd1dULL));
    return RngStream(h);
}

double RngStream::normal(double mean, double sd) {
    // Box-Muller, cosine branch; the sine partner is discarded so the
    // stream has no hidden cache state.
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * (r * std::cos(6.283185307179586 * u2));
}

namespace {

// Inverted-CDF search; requires n*p <= ~30 and p <= 0.5 so q^n cannot
// underflow. Cost grows with n*p, not n.
std::int64_t binomial_inversion(RngStream& rng, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double qn = std::exp(static_cast<double>(n) * std::log(q));
    const double np = static_cast<double>(n) * p;
    const double bound = std::min(static_cast<double>(n), np + 10.0 * std::sqrt(np * q + 1.0));
    for (;;) {
        double px = qn;
        double u = rng.uniform();
        std::int64_t x = 0;
        while (u > px) {
            ++x;
            if (static_cast<double>(x) > bound) break;  // restart; ~never taken
            u -= px;
            px = ((static_cast<double>(n - x + 1)) * p * px) / (static_cast<double>(x) * q);
        }
        if (static_cast<double>(x) <= bound) return x;
    }
}

// BTPE (Kachitvichyanukul & Schmeiser 1988): triangle + parallelogram +
// two exponential tails over the scaled histogram, with squeeze and
// Stirling-series acceptance. Requires n*p > ~30, p <= 0.5. O(1) in n.
std::int64_t binomial_btpe(RngStream& rng, std::int64_t n, double p) {
    const double r = p;
    const double q = 1.0 - r;
    const double nrq = static_cast<double>(n) * r * q;
    const double fm = static_cast<double>(n) * r + r;
    const std::int64_t m = static_cast<std::int64_t>(std::floor(fm));
    const double p1 = std::floor(2.195 * std::sqrt(nrq) - 4.6 * q) + 0.5;
    const double xm = static_cast<double>(m) + 0.5;
    const double xl = xm - p1;
    const double xr = xm + p1;
    const double c = 0.134 + 20.5 / (15.3 + static_cast<double>(m));
    double a = (fm - xl) / (fm - xl * r);
    const double laml = a * (1.0 + a / 2.0);
    a = (xr - fm) / (xr * q);
    const double lamr = a * (1.0 + a / 2.0);
    const double p2 = p1 * (1.0 + 2.0 * c);
    const double p3 = p2 + c / laml;
    const double p4 = p3 + c / lamr;

    for (;;) {
        const double u = rng.uniform() * p4;
        double v = rng.uniform();
        std::int64_t y;
        if (u <= p1) {
            // triangular core: accept without further tests
            return static_cast<std::int64_t>(std::floor(xm - p1 * v + u));
        }
        if (u <= p2) {
            const double x = xl + (u - p1) / c;
            v = v * c + 1.0 - std::fabs(static_cast<double>(m) - x + 0.5) / p1;
            if (v > 1.0) continue;
            y = static_cast<std::int64_t>(std::floor(x));
        } else if (u <= p3) {
            y = static_cast<std::int64_t>(std::floor(xl + std::log(v) / laml));
            if (y < 0) continue;
            v = v * (u - p2) * laml;
        } else {
            y = static_cast<std::int64_t>(std::floor(xr - std::log(v) / lamr));
            if (y > n) continue;
            v = v * (u - p3) * lamr;
        }

        const std::int64_t k = std::llabs(y - m);
        if (k <= 20 || static_cast<double>(k) >= nrq / 2.0 - 1.0) {
            // small |y-m|: evaluate the density ratio directly
            const double s = r / q;
            a = s * static_cast<double>(n + 1);
            double f = 1.0;
            if (m < y) {
                for (std::int64_t i = m + 1; i <= y; ++i)
                    f *= (a / static_cast<double>(i) - s);
            } else if (m > y) {
                for (std::int64_t i = y + 1; i <= m; ++i)
                    f /= (a / static_cast<double>(i) - s);
            }
            if (v <= f) return y;
            continue;
        }

        const double kk = static_cast<double>(k);
        const double rho =
            (kk / nrq) * ((kk * (kk / 3.0 + 0.625) + 0.16666666666666666) / nrq + 0.5);
        const double t = -kk * kk / (2.0 * nrq);
        const double lv = std::log(v);
        if (lv < t - rho) return y;  // squeeze accept
        if (lv > t + rho) continue;  // squeeze reject

        const double x1 = static_cast<double>(y + 1);
        const double f1 = static_cast<double>(m + 1);
        const double z = static_cast<double>(n + 1 - m);
        const double w = static_cast<double>(n - y + 1);
        const double x2 = x1 * x1;
        const double f2 = f1 * f1;
        const double z2 = z * z;
        const double w2 = w * w;
        const double stirling =
            xm * std::log(f1 / x1) + (static_cast<double>(n - m) + 0.5) * std::log(z / w) +
            static_cast<double>(y - m) * std::log(w * r / (x1 * q)) +
            (13680.0 - (462.0 - (132.0 - (99.0 - 140.0 / f2) / f2) / f2) / f2) / f1 / 166320.0 +
            (13680.0 - (462.0 - (132.0 - (99.0 - 140.0 / z2) / z2) / z2) / z2) / z / 166320.0 +
            (13680.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2) / x1 / 166320.0 +
            (13680.0 - (462.0 - (132.0 - (99.0 - 140.0 / w2) / w2) / w2) / w2) / w / 166320.0;
        if (lv <= stirling) return y;
    }
}

// Knuth product-of-uniforms; exact but O(lambda), callers keep lambda <= 16.
std::int64_t poisson_knuth(RngStream& rng, double lambda) {
    const double limit = std::exp(-lambda);
    double prod = 1.0;
    std::int64_t k = 0;
    do {
        ++k;
        prod *= rng.uniform_open();
    } while (prod > limit);
    return k - 1;
}

}  // namespace

std::int64_t RngStream::binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    if (static_cast<double>(n) * p <= 30.0) return binomial_inversion(*this, n, p);
    return binomial_btpe(*this, n, p);
}

std::int64_t RngStream::poisson(double lambda) {
    if (!(lambda > 0.0)) return 0;
    // Pois(a+b) = Pois(a) + Pois(b): split large rates into exact chunks
    std::int64_t total = 0;
    while (lambda > 16.0) {
        total += poisson_knuth(*this, 16.0);
        lambda -= 16.0;
    }
    return total + poisson_knuth(*this, lambda);
}

}  // namespace vlsim
