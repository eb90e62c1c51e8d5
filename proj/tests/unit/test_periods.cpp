#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ellorbit/periods.hpp"

using namespace ellorbit;

TEST_CASE("agm basics", "[periods]") {
    CHECK(static_cast<double>(agm(bigreal(1), bigreal(1))) == Catch::Approx(1.0));
    CHECK(static_cast<double>(agm(sqrt(bigreal(2)), bigreal(1))) ==
          Catch::Approx(1.19814023473559220744).epsilon(1e-15));
    CHECK_THROWS_AS(agm(bigreal(-1), bigreal(1)), precision_error);
}

TEST_CASE("square lattice periods", "[periods]") {
    // g2 = 4, g3 = 0: roots -1, 0, 1; omega1 = pi / agm(sqrt2, 1)
    const Curve c = parse_curve("classical:4,0");
    const Lattice lat = compute_periods(c);
    CHECK(lat.shape == LatticeShape::rectangular);
    CHECK(lat.omega1 == Catch::Approx(2.62205755429211981046).epsilon(1e-14));
    CHECK(lat.omega2_im == Catch::Approx(2.62205755429211981046).epsilon(1e-14));
    CHECK(lat.omega2_re == 0.0);
    CHECK(lat.q == Catch::Approx(0.00186744273170798881).epsilon(1e-13));
    CHECK(lat.q > 0.0);
}

TEST_CASE("rectangular periods against quadrature", "[periods]") {
    const Curve c = parse_curve("long:0,0,1,-1,0");
    const Lattice lat = compute_periods(c);
    CHECK(lat.omega1 == Catch::Approx(2.99345864623195962983).epsilon(1e-13));
    CHECK(lat.omega2_im == Catch::Approx(2.45138938198679006085).epsilon(1e-13));

    CHECK(omega1_by_quadrature(c) == Catch::Approx(lat.omega1).epsilon(1e-10));
    CHECK(omega1_by_bounded_loop(c) == Catch::Approx(lat.omega1).epsilon(1e-10));
    CHECK(omega2_im_by_quadrature(c) == Catch::Approx(lat.omega2_im).epsilon(1e-10));

    // same curve through its short form must give the halved x-scale periods
    const Curve sh = parse_curve("short:-16,16");
    const Lattice lsh = compute_periods(sh);
    CHECK(lsh.omega1 == Catch::Approx(1.49672932311597981492).epsilon(1e-13));
    CHECK(omega1_by_quadrature(sh) == Catch::Approx(lsh.omega1).epsilon(1e-10));
}

TEST_CASE("rhombic periods against quadrature", "[periods]") {
    const Curve c = parse_curve("short:0,1");
    const Lattice lat = compute_periods(c);
    CHECK(lat.shape == LatticeShape::rhombic);
    CHECK(lat.omega1 == Catch::Approx(4.20654631597636278353).epsilon(1e-13));
    CHECK(lat.omega2_im == Catch::Approx(1.21432532394379080591).epsilon(1e-13));
    CHECK(lat.omega2_re == Catch::Approx(lat.omega1 / 2).epsilon(1e-14));
    CHECK(lat.q == Catch::Approx(-0.16303353482158046486).epsilon(1e-12));
    CHECK(lat.q < 0.0);
    CHECK(omega1_by_quadrature(c) == Catch::Approx(lat.omega1).epsilon(1e-10));

    // a second rhombic curve, cross-checked only against quadrature
    const Curve c2 = parse_curve("short:2,3");
    const Lattice l2 = compute_periods(c2);
    CHECK(omega1_by_quadrature(c2) == Catch::Approx(l2.omega1).epsilon(1e-10));
}

TEST_CASE("laurent coefficients", "[periods]") {
    const Curve c = parse_curve("long:0,0,1,-1,0");  // g2 = 4, g3 = -1
    const Lattice lat = compute_periods(c);
    CHECK(lat.c[2] == Catch::Approx(0.2).epsilon(1e-15));
    CHECK(lat.c[3] == Catch::Approx(-1.0 / 28.0).epsilon(1e-15));
    CHECK(lat.c[4] == Catch::Approx(0.04 / 3.0).epsilon(1e-14));
    CHECK(lat.c[5] == Catch::Approx(3.0 * 0.2 * (-1.0 / 28.0) / 11.0).epsilon(1e-14));
    CHECK(lat.series_terms > 0);
    CHECK(lat.laurent_window > 0.0);
}

TEST_CASE("quadrature oracles demand two components", "[periods]") {
    const Curve c = parse_curve("short:0,1");
    CHECK_THROWS_AS(omega1_by_bounded_loop(c), validation_error);
    CHECK_THROWS_AS(omega2_im_by_quadrature(c), validation_error);
}
