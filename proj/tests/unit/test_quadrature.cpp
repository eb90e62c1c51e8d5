#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ellorbit/quadrature.hpp"

using namespace ellorbit;

TEST_CASE("smooth integrands", "[quadrature]") {
    auto sq = integrate([](double x) { return x * x; }, 0.0, 1.0);
    REQUIRE(sq.converged);
    CHECK(sq.value == Catch::Approx(1.0 / 3.0).epsilon(1e-14));

    auto sine = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(sine.value == Catch::Approx(2.0).epsilon(1e-13));

    // reversed limits flip the sign
    auto rev = integrate([](double x) { return x * x; }, 1.0, 0.0);
    CHECK(rev.value == Catch::Approx(-1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("inverse square root edges", "[quadrature]") {
    // int_0^1 x^-1/2 = 2, singular at the left end
    auto left = integrate_sqrt_left([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(left.value == Catch::Approx(2.0).epsilon(1e-13));

    auto right = integrate_sqrt_right([](double x) { return 1.0 / std::sqrt(1.0 - x); }, 0.0, 1.0);
    CHECK(right.value == Catch::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("infinite tails", "[quadrature]") {
    auto alg = integrate_to_infinity([](double x) { return std::pow(x, -1.5); }, 1.0, 1.0);
    CHECK(alg.value == Catch::Approx(2.0).epsilon(1e-13));

    auto inv2 = integrate_to_infinity([](double x) { return 1.0 / (x * x); }, 1.0, 1.0);
    CHECK(inv2.value == Catch::Approx(1.0).epsilon(1e-13));

    auto expo = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0);
    CHECK(expo.value == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("singular plus infinite split", "[quadrature]") {
    // int_0^inf dx / (sqrt(x) (1 + x^2)) = pi / sqrt(2)
    auto f = [](double x) { return 1.0 / (std::sqrt(x) * (1.0 + x * x)); };
    const double head = integrate_sqrt_left(f, 0.0, 1.0).checked("head");
    const double tail = integrate_to_infinity(f, 1.0, 1.0).checked("tail");
    CHECK(head + tail == Catch::Approx(2.221441469079183123507940).epsilon(1e-13));
}

TEST_CASE("failure reporting", "[quadrature]") {
    // a spike the two-level refinement cannot resolve: checked() must throw
    auto spike = [](double x) { return 1.0 / (1e-12 + (x - 0.3141) * (x - 0.3141)); };
    auto r = integrate(spike, 0.0, 1.0, 1e-12, 1e-14, 3);
    REQUIRE_FALSE(r.converged);
    CHECK_THROWS_AS(r.checked("spike"), precision_error);
}
