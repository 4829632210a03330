#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "vlsim/fastmath.hpp"
#include "vlsim/rng.hpp"

namespace {

double rel_err(double got, double want) {
    if (want == 0.0) return std::fabs(got);
    return std::fabs(got - want) / std::fabs(want);
}

}  // namespace

TEST_SUITE("fastmath") {

TEST_CASE("exp matches libm over the hot range") {
    vlsim::RngStream rng(0x5eed);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double x = rng.uniform(-30.0, 30.0);
        worst = std::max(worst, rel_err(vlsim::fastmath::exp(x), std::exp(x)));
    }
    CHECK(worst < 4e-16);
}

TEST_CASE("exp matches libm over the full finite range") {
    vlsim::RngStream rng(0xabcdef);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double x = rng.uniform(-708.0, 709.0);
        worst = std::max(worst, rel_err(vlsim::fastmath::exp(x), std::exp(x)));
    }
    CHECK(worst < 2e-15);
}

TEST_CASE("exp exact and boundary values") {
    CHECK(vlsim::fastmath::exp(0.0) == 1.0);
    CHECK(vlsim::fastmath::exp(-708.0) > 0.0);
    CHECK(std::isfinite(vlsim::fastmath::exp(709.0)));
    // documented clamp behavior outside [-708, 709]
    CHECK(vlsim::fastmath::exp(-708.5) == 0.0);
    CHECK(vlsim::fastmath::exp(-1000.0) == 0.0);
    CHECK(std::isinf(vlsim::fastmath::exp(709.5)));
    CHECK(std::isinf(vlsim::fastmath::exp(1000.0)));
}

TEST_CASE("exp is deterministic") {
    vlsim::RngStream rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-700.0, 700.0);
        const double a = vlsim::fastmath::exp(x);
        const double b = vlsim::fastmath::exp(x);
        CHECK(std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b));
    }
}

TEST_CASE("pow2i covers the normal exponent range") {
    for (int n = -1022; n <= 1023; ++n) {
        const double got = vlsim::fastmath::ScalarLane::pow2i(static_cast<double>(n));
        CHECK(got == std::ldexp(1.0, n));
    }
}

}  // TEST_SUITE
