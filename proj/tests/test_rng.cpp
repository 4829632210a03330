#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "vlsim/rng.hpp"

using vlsim::Phase;
using vlsim::RngStream;
using vlsim::make_stream;

namespace {

double binomial_pmf(std::int64_t n, double p, std::int64_t k) {
    const double lg = std::lgamma(static_cast<double>(n + 1)) -
                      std::lgamma(static_cast<double>(k + 1)) -
                      std::lgamma(static_cast<double>(n - k + 1));
    return std::exp(lg + static_cast<double>(k) * std::log(p) +
                    static_cast<double>(n - k) * std::log1p(-p));
}

double poisson_pmf(double lambda, std::int64_t k) {
    return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                    std::lgamma(static_cast<double>(k + 1)));
}

// chi-square of observed counts vs expected pmf over [lo, hi], tails pooled
template <class Pmf>
double chi_square(const std::vector<std::int64_t>& draws, std::int64_t lo, std::int64_t hi,
                  Pmf&& pmf) {
    const std::size_t nbins = static_cast<std::size_t>(hi - lo + 1) + 2;
    std::vector<double> obs(nbins, 0.0), exp_(nbins, 0.0);
    for (const std::int64_t d : draws) {
        if (d < lo)
            obs[0] += 1.0;
        else if (d > hi)
            obs[nbins - 1] += 1.0;
        else
            obs[static_cast<std::size_t>(d - lo) + 1] += 1.0;
    }
    double below = 0.0, inside = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k) {
        const double pk = pmf(k);
        exp_[static_cast<std::size_t>(k - lo) + 1] = pk * static_cast<double>(draws.size());
        inside += pk;
    }
    for (std::int64_t k = 0; k < lo; ++k) below += pmf(k);
    exp_[0] = below * static_cast<double>(draws.size());
    exp_[nbins - 1] = (1.0 - below - inside) * static_cast<double>(draws.size());
    double chi2 = 0.0;
    for (std::size_t i = 0; i < nbins; ++i) {
        if (exp_[i] < 5.0) continue;  // drop sparse bins
        const double diff = obs[i] - exp_[i];
        chi2 += diff * diff / exp_[i];
    }
    return chi2;
}

struct Moments {
    double mean;
    double var;
};

Moments moments(const std::vector<std::int64_t>& xs) {
    double m = 0.0;
    for (const auto x : xs) m += static_cast<double>(x);
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (const auto x : xs) {
        const double d = static_cast<double>(x) - m;
        v += d * d;
    }
    return {m, v / static_cast<double>(xs.size() - 1)};
}

}  // namespace

TEST_SUITE("rng") {

TEST_CASE("streams replay and keys separate") {
    RngStream a = make_stream(42, 7, 100, Phase::growth);
    RngStream b = make_stream(42, 7, 100, Phase::growth);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());

    const std::uint64_t base = make_stream(42, 7, 100, Phase::growth).next_u64();
    CHECK(make_stream(43, 7, 100, Phase::growth).next_u64() != base);
    CHECK(make_stream(42, 8, 100, Phase::growth).next_u64() != base);
    CHECK(make_stream(42, 7, 101, Phase::growth).next_u64() != base);
    CHECK(make_stream(42, 7, 100, Phase::natural_death).next_u64() != base);
}

TEST_CASE("uniform ranges") {
    RngStream rng(11);
    double mn = 1.0, mx = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        mn = std::min(mn, u);
        mx = std::max(mx, u);
    }
    CHECK(mn < 1e-3);
    CHECK(mx > 1.0 - 1e-3);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform_open();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(3.0, 8.0);
        CHECK(u >= 3.0);
        CHECK(u < 8.0);
    }
}

TEST_CASE("uniform_int is flat") {
    RngStream rng(13);
    const int N = 140000;
    std::vector<int> counts(7, 0);
    for (int i = 0; i < N; ++i) {
        const auto v = rng.uniform_int(7);
        REQUIRE(v < 7);
        ++counts[static_cast<std::size_t>(v)];
    }
    const double expect = N / 7.0;
    const double sigma = std::sqrt(expect * (1.0 - 1.0 / 7.0));
    for (const int c : counts) CHECK(std::fabs(c - expect) < 5.0 * sigma);
}

TEST_CASE("binomial edge cases") {
    RngStream rng(17);
    CHECK(rng.binomial(0, 0.5) == 0);
    CHECK(rng.binomial(10, 0.0) == 0);
    CHECK(rng.binomial(10, 1.0) == 10);
    CHECK(rng.binomial(-3, 0.5) == 0);
    for (int i = 0; i < 100; ++i) {
        const auto v = rng.binomial(5, 0.4);
        CHECK(v >= 0);
        CHECK(v <= 5);
    }
}

TEST_CASE("binomial moments across sampler regimes") {
    // spans inversion (np <= 30), BTPE (np > 30) and the p > 0.5 reflection
    const struct {
        std::int64_t n;
        double p;
    } cases[] = {{10, 0.3}, {100, 0.25}, {1000, 0.04}, {400, 0.3},
                 {50, 0.7}, {200, 0.9},  {1000, 0.47}};
    const int N = 100000;
    int seed = 100;
    for (const auto& c : cases) {
        CAPTURE(c.n);
        CAPTURE(c.p);
        RngStream rng(static_cast<std::uint64_t>(seed++));
        std::vector<std::int64_t> xs(N);
        for (auto& x : xs) x = rng.binomial(c.n, c.p);
        const auto [mean, var] = moments(xs);
        const double want_mean = static_cast<double>(c.n) * c.p;
        const double want_var = want_mean * (1.0 - c.p);
        CHECK(std::fabs(mean - want_mean) < 5.0 * std::sqrt(want_var / N));
        CHECK(var == doctest::Approx(want_var).epsilon(0.05));
    }
}

TEST_CASE("binomial matches exact pmf (inversion regime)") {
    RngStream rng(23);
    const int N = 200000;
    std::vector<std::int64_t> xs(N);
    for (auto& x : xs) x = rng.binomial(12, 0.3);
    const double chi2 =
        chi_square(xs, 0, 12, [](std::int64_t k) { return binomial_pmf(12, 0.3, k); });
    CHECK(chi2 < 40.0);  // ~11 dof
}

TEST_CASE("binomial matches exact pmf (BTPE regime)") {
    RngStream rng(29);
    const int N = 200000;
    const std::int64_t n = 300;
    const double p = 0.2;
    std::vector<std::int64_t> xs(N);
    for (auto& x : xs) x = rng.binomial(n, p);
    const double chi2 =
        chi_square(xs, 25, 95, [&](std::int64_t k) { return binomial_pmf(n, p, k); });
    CHECK(chi2 < 130.0);  // ~70 dof
}

TEST_CASE("binomial cost is flat in n") {
    // draw with an astronomically large n; only closes if the sampler is
    // O(1) in n rather than per-trial
    RngStream rng(31);
    const std::int64_t n = 1000000000;
    const double p = 0.4;
    const double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
    for (int i = 0; i < 100; ++i) {
        const auto v = rng.binomial(n, p);
        CHECK(std::fabs(static_cast<double>(v) - 4e8) < 6.0 * sd);
    }
}

TEST_CASE("poisson edge cases and moments") {
    RngStream rng(37);
    CHECK(rng.poisson(0.0) == 0);
    CHECK(rng.poisson(-1.0) == 0);
    const double lambdas[] = {0.5, 3.0, 16.0, 40.7};
    const int N = 100000;
    int seed = 200;
    for (const double lam : lambdas) {
        CAPTURE(lam);
        RngStream r(static_cast<std::uint64_t>(seed++));
        std::vector<std::int64_t> xs(N);
        for (auto& x : xs) x = r.poisson(lam);
        const auto [mean, var] = moments(xs);
        CHECK(std::fabs(mean - lam) < 5.0 * std::sqrt(lam / N));
        CHECK(var == doctest::Approx(lam).epsilon(0.05));
    }
}

TEST_CASE("poisson matches exact pmf across the chunk boundary") {
    // lambda > 16 exercises the Pois(a+b) composition path
    RngStream rng(41);
    const int N = 200000;
    const double lam = 20.0;
    std::vector<std::int64_t> xs(N);
    for (auto& x : xs) x = rng.poisson(lam);
    const double chi2 =
        chi_square(xs, 5, 40, [&](std::int64_t k) { return poisson_pmf(lam, k); });
    CHECK(chi2 < 90.0);  // ~36 dof
}

TEST_CASE("normal moments and central mass") {
    RngStream rng(43);
    const int N = 200000;
    double sum = 0.0, sumsq = 0.0;
    int within = 0;
    for (int i = 0; i < N; ++i) {
        const double x = rng.normal(5.0, 2.0);
        sum += x;
        sumsq += x * x;
        if (std::fabs(x - 5.0) < 2.0) ++within;
    }
    const double mean = sum / N;
    const double var = sumsq / N - mean * mean;
    CHECK(std::fabs(mean - 5.0) < 5.0 * 2.0 / std::sqrt(static_cast<double>(N)));
    CHECK(var == doctest::Approx(4.0).epsilon(0.03));
    CHECK(static_cast<double>(within) / N == doctest::Approx(0.682689).epsilon(0.01));
}

}  // TEST_SUITE
