#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ellorbit/distribution.hpp"
#include "ellorbit/orbit.hpp"
#include "ellorbit/weierstrass.hpp"

using namespace ellorbit;
using Catch::Matchers::ContainsSubstring;

namespace {

Orbit figure_one_orbit() {
    const Curve c = parse_curve("short:0,1");
    const double x = -0.406;
    const double y = std::sqrt(1.0 + x * x * x);
    return make_orbit(c, make_point(c, x, y));
}

Orbit e37_orbit() {
    const Curve c = parse_curve("long:0,0,1,-1,0");
    return make_orbit(c, make_point(c, 0.0, 0.0));
}

DensityModel model_of(const Orbit& orb) {
    return make_density_model(orb.curve, orb.lattice);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("theoretical cdf matches the torus pushforward", "[distribution]") {
    const Orbit orb = figure_one_orbit();
    const DensityModel m = model_of(orb);
    CHECK(m.norm_residual <= 1e-9);

    // support edge and everything below it
    const double e = orb.curve.e_max();
    CHECK(theoretical_x_cdf(m, Component::unbounded, e).value == 0.0);
    CHECK_FALSE(theoretical_x_cdf(m, Component::unbounded, e).clamped);
    const auto low = theoretical_x_cdf(m, Component::unbounded, e - 1.0);
    CHECK(low.value == 0.0);
    CHECK(low.clamped);

    // full mass at the right end, with the closed-form tail at large x
    CHECK(theoretical_x_cdf(m, Component::unbounded, kInf).value == 1.0);
    const double w1 = orb.lattice.omega1;
    CHECK(theoretical_x_cdf(m, Component::unbounded, 1e8).value ==
          Catch::Approx(1.0 - 2.0 / (w1 * 1e4)).margin(1e-11));

    // the cdf of x at torus distance t is exactly 1 - 2t on a one-row orbit,
    // so the quadrature path must reproduce that pushforward
    for (double t : {0.05, 0.1, 0.2, 0.3, 0.45}) {
        const double x = wp_pair_at(orb.lattice, t, false).first;
        CHECK(theoretical_x_cdf(m, Component::unbounded, x).value ==
              Catch::Approx(1.0 - 2.0 * t).margin(1e-9));
    }
    CHECK(theoretical_x_cdf(m, Component::unbounded, 2.0).value <
          theoretical_x_cdf(m, Component::unbounded, 10.0).value);

    CHECK_THROWS_WITH(theoretical_x_cdf(m, Component::bounded, 1.0),
                      ContainsSubstring("two-component"));
    CHECK_THROWS_AS(
        theoretical_x_cdf(m, Component::unbounded, std::nan("")),
        validation_error);
}

TEST_CASE("bounded-base cdf splits its mass across the lobes", "[distribution]") {
    const Orbit orb = e37_orbit();
    const DensityModel m = model_of(orb);
    CHECK(m.norm_residual <= 1e-9);
    const Curve& c = orb.curve;

    // half the mass sits on the bounded lobe
    CHECK(theoretical_x_cdf(m, Component::bounded, c.e_mid()).value ==
          Catch::Approx(0.5).margin(1e-9));

    // the gap between the lobes is flat and flagged
    const auto gap = theoretical_x_cdf(
        m, Component::bounded, 0.5 * (c.e_mid() + c.e_max()));
    CHECK(gap.value == Catch::Approx(0.5).margin(1e-9));
    CHECK(gap.clamped);

    const auto low = theoretical_x_cdf(m, Component::bounded, c.e_min() - 0.5);
    CHECK(low.value == 0.0);
    CHECK(low.clamped);

    // pushforward identities on both rows: lobe x at row distance t carries
    // cdf t, unbounded x at row distance t carries cdf 1 - t
    for (double t : {0.1, 0.25, 0.4}) {
        const double xl = wp_pair_at(orb.lattice, t, true).first;
        CHECK(theoretical_x_cdf(m, Component::bounded, xl).value ==
              Catch::Approx(t).margin(1e-9));
        const double xa = wp_pair_at(orb.lattice, t, false).first;
        CHECK(theoretical_x_cdf(m, Component::bounded, xa).value ==
              Catch::Approx(1.0 - t).margin(1e-9));
    }

    // an unbounded base never visits the lobe
    const auto lobe = theoretical_x_cdf(m, Component::unbounded, 0.0);
    CHECK(lobe.value == 0.0);
    CHECK(lobe.clamped);
}

TEST_CASE("point density follows the component rule", "[distribution]") {
    const Orbit orb = e37_orbit();
    const DensityModel m = model_of(orb);

    // base point in canonical coordinates: (0, 1), on the bounded lobe
    const RealPoint p0 = nth_point_canonical(orb, 1);
    CHECK(p0.x == Catch::Approx(0.0).margin(1e-12));
    CHECK(p0.component == Component::bounded);

    // bounded target, unbounded base: density is exactly zero
    const auto off = point_density(m, p0, Component::unbounded, 1e-3);
    CHECK(off.value == 0.0);
    CHECK(off.order_eps2 == 0.0);

    // bounded base: weight 1/2, speed sqrt(y0^2 + (6 x0^2 - g2/2)^2)
    const double speed = std::hypot(p0.y, 6.0 * p0.x * p0.x - 0.5 * orb.curve.g2);
    const auto pd = point_density(m, p0, Component::bounded, 1e-3);
    CHECK(pd.value ==
          Catch::Approx(1e-3 / (orb.lattice.omega1 * speed)).epsilon(1e-9));

    // leading order is linear in eps, and the quadratic bracket rides along
    const auto pd2 = point_density(m, p0, Component::bounded, 2e-3);
    CHECK(pd2.value == Catch::Approx(2.0 * pd.value).epsilon(1e-12));
    CHECK(pd.order_eps2 == Catch::Approx(pd.value * 1e-3).epsilon(1e-12));

    RealPoint off_curve;
    off_curve.x = 0.3;
    off_curve.y = 5.0;
    CHECK_THROWS_WITH(point_density(m, off_curve, Component::bounded, 1e-3),
                      ContainsSubstring("lie on the curve"));
    CHECK_THROWS_AS(point_density(m, RealPoint::infinity(), Component::bounded, 1e-3),
                    validation_error);
    CHECK_THROWS_AS(point_density(m, p0, Component::bounded, 0.0),
                    validation_error);
    CHECK_THROWS_WITH(point_density(m, p0, Component::bounded, 10.0),
                      ContainsSubstring("curvature"));
}

TEST_CASE("ball hit frequencies follow the density law", "[distribution][slow]") {
    const Orbit orb = e37_orbit();
    const DensityModel m = model_of(orb);

    // small balls around a handful of multiples of the base point
    const double eps = 0.02;
    std::vector<RealPoint> centers;
    std::vector<double> predicted;
    for (std::int64_t j : {1, 2, 3, 5, 7}) {
        const RealPoint p = nth_point_canonical(orb, j);
        centers.push_back(p);
        predicted.push_back(point_density(m, p, Component::bounded, eps).value);
    }

    const std::int64_t n_max = 100000;
    std::vector<std::int64_t> hits(centers.size(), 0);
    orbit_scan(orb, n_max, [&](const OrbitSample& s) {
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double dx = s.x - centers[i].x;
            const double dy = s.y - centers[i].y;
            if (dx * dx + dy * dy < eps * eps) ++hits[i];
        }
    });

    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double freq = static_cast<double>(hits[i]) / n_max;
        INFO("ball " << i << " at x = " << centers[i].x);
        CHECK(freq == Catch::Approx(predicted[i]).epsilon(0.10));
    }
}

TEST_CASE("region densities integrate the limiting law", "[distribution]") {
    const Orbit orb1 = figure_one_orbit();
    const DensityModel m1 = model_of(orb1);
    const Orbit orb2 = e37_orbit();
    const DensityModel m2 = model_of(orb2);

    // the whole plane has density one in both base regimes
    CHECK(region_density(m1, Component::unbounded, region_everything()) == 1.0);
    CHECK(region_density(m2, Component::bounded, region_everything()) == 1.0);
    CHECK(region_density(m2, Component::unbounded, region_everything()) == 1.0);

    // tail thresholds reproduce the inverse square root law
    const double w1 = orb1.lattice.omega1;
    for (double X : {1e2, 1e3, 1e4}) {
        const double rho = region_density(m1, Component::unbounded, region_x_above(X));
        CHECK(std::abs(rho - 2.0 / (w1 * std::sqrt(X))) <= std::pow(X, -2.5));
    }

    // the bounded lobe carries half the mass for a bounded base and none
    // for an unbounded one
    const Region lobe = region_x_slice(orb2.curve.e_min(), orb2.curve.e_mid());
    CHECK(region_density(m2, Component::bounded, lobe) ==
          Catch::Approx(0.5).margin(1e-9));
    CHECK(region_density(m2, Component::unbounded, lobe) == 0.0);

    // the x-density is symmetric in the sign of y
    const double pos =
        region_density(m1, Component::unbounded, region_x_slice(1.0, 3.0, YSign::positive));
    const double neg =
        region_density(m1, Component::unbounded, region_x_slice(1.0, 3.0, YSign::negative));
    const double both =
        region_density(m1, Component::unbounded, region_x_slice(1.0, 3.0));
    CHECK(pos == neg);
    CHECK(pos + neg == both);

    // a ball list region is the sum of its point densities
    Region balls;
    balls.balls.push_back({nth_point_canonical(orb2, 1), 0.01});
    balls.balls.push_back({nth_point_canonical(orb2, 2), 0.01});
    const double sum =
        point_density(m2, balls.balls[0].center, Component::bounded, 0.01).value +
        point_density(m2, balls.balls[1].center, Component::bounded, 0.01).value;
    CHECK(region_density(m2, Component::bounded, balls) == Catch::Approx(sum));

    Region bad;
    bad.intervals.push_back({3.0, 1.0, YSign::both});
    CHECK_THROWS_WITH(region_density(m1, Component::unbounded, bad),
                      ContainsSubstring("ordered"));
}

TEST_CASE("ball density agrees with its x-shadow interval", "[distribution]") {
    // a small ball around a smooth point covers the same orbit mass as the
    // x-interval it shadows on one y-branch; the two code paths must agree
    // to first order
    const Orbit orb = figure_one_orbit();
    const DensityModel m = model_of(orb);

    RealPoint p0;
    for (std::int64_t j = 2; j <= 10; ++j) {
        p0 = nth_point_canonical(orb, j);
        if (std::abs(p0.y) > 0.5 && std::abs(p0.x) < 5.0 &&
            p0.x > orb.curve.e_max() + 0.2)
            break;
    }
    const double eps = 1e-3;
    const double speed = std::hypot(p0.y, 6.0 * p0.x * p0.x - 0.5 * orb.curve.g2);
    const double half_width = eps * std::abs(p0.y) / speed;
    const Region shadow = region_x_slice(
        p0.x - half_width, p0.x + half_width,
        p0.y > 0.0 ? YSign::positive : YSign::negative);

    const double ball = point_density(m, p0, Component::unbounded, eps).value;
    const double interval = region_density(m, Component::unbounded, shadow);
    CHECK(ball == Catch::Approx(interval).epsilon(0.01));
}

TEST_CASE("empirical distribution matches the law", "[distribution][ks]") {
    const Orbit orb = figure_one_orbit();
    const DensityModel m = model_of(orb);

    const double d_small = empirical_vs_theoretical(orb, m, 1000);
    const double d_large = empirical_vs_theoretical(orb, m, 100000);
    CHECK(d_large < 0.01);
    CHECK(d_small < 0.1);
    // more samples cannot make the fit worse, beyond statistical noise
    CHECK(d_large < d_small + 0.005);

    // bounded bases interleave the two rows and still converge
    const Curve cb = parse_curve("short:-16,16");
    const Orbit orbb = make_orbit(cb, make_point(cb, 0.0, 4.0));
    CHECK(empirical_vs_theoretical(orbb, model_of(orbb), 20000) < 0.01);

    const Orbit orbe = e37_orbit();
    CHECK(empirical_vs_theoretical(orbe, model_of(orbe), 20000) < 0.01);

    CHECK_THROWS_AS(empirical_vs_theoretical(orb, m, 0), validation_error);
    CHECK_THROWS_AS(empirical_vs_theoretical(orb, m, 1000, 4), validation_error);
    CHECK_THROWS_WITH(empirical_vs_theoretical(orbe, m, 1000),
                      ContainsSubstring("different curves"));
}

TEST_CASE("discrepancy residuals", "[distribution][slow]") {
    const Orbit orb = figure_one_orbit();
    const DensityModel m = model_of(orb);

    // the trivial region is counted exactly: every residual vanishes and no
    // exponent can be fitted
    const auto trivial = discrepancy_residual(orb, m, region_everything(),
                                              {10, 100, 1000});
    CHECK(trivial.rho == 1.0);
    for (std::size_t i = 0; i < trivial.n.size(); ++i) {
        CHECK(trivial.count[i] == trivial.n[i]);
        CHECK(trivial.residual[i] == 0.0);
    }
    CHECK(std::isnan(trivial.fitted_exponent));

    // a generic base point and a fixed window: the residual grows far more
    // slowly than the count itself
    const Curve c = parse_curve("short:0,1");
    const double x0 = 0.31830988618367;  // arbitrary non-special abscissa
    const Orbit orb2 = make_orbit(c, make_point(c, x0, std::sqrt(1.0 + x0 * x0 * x0)));
    const DensityModel m2 = model_of(orb2);
    const std::vector<std::int64_t> grid = {10000,  31623,  100000,
                                            316228, 1000000};
    const auto series =
        discrepancy_residual(orb2, m2, region_x_slice(0.5, 2.5), grid);
    CHECK(series.fitted_exponent < 0.75);

    // the hit frequency settles onto the density
    const double final_freq =
        static_cast<double>(series.count.back()) / static_cast<double>(grid.back());
    CHECK(std::abs(final_freq - series.rho) <
          2.0 / std::sqrt(static_cast<double>(grid.back())) * 2.0);

    CHECK_THROWS_AS(discrepancy_residual(orb, m, region_everything(), {}),
                    validation_error);
    CHECK_THROWS_AS(discrepancy_residual(orb, m, region_everything(), {100, 100}),
                    validation_error);
    CHECK_THROWS_AS(
        discrepancy_residual(orb, m, region_everything(), {20'000'000}),
        validation_error);
}

TEST_CASE("empirical histogram honours its trim policy", "[distribution]") {
    std::vector<double> edges;
    for (int i = 0; i <= 10; ++i) edges.push_back(static_cast<double>(i));
    auto d = make_empirical(edges, 0.1, 0.1);

    for (int k = 0; k < 1000; ++k)
        empirical_add(d, 10.0 * (k + 0.5) / 1000.0);
    CHECK(d.total() == 1000);
    CHECK(d.below == 0);
    CHECK(d.above == 0);

    // each decile bin holds exactly a tenth of the mass, so the trim drops
    // one bin from either end
    const auto [first, last] = trim_window(d);
    CHECK(first == 1);
    CHECK(last == 8);

    empirical_add(d, -5.0);
    empirical_add(d, 100.0);
    CHECK(d.below == 1);
    CHECK(d.above == 1);

    CHECK_THROWS_AS(make_empirical({1.0}), validation_error);
    CHECK_THROWS_AS(make_empirical({1.0, 1.0}), validation_error);
    CHECK_THROWS_AS(make_empirical(edges, 0.6, 0.5), validation_error);

    auto all = make_empirical({0.0, 1.0}, 0.45, 0.45);
    CHECK_THROWS_WITH(trim_window(all), ContainsSubstring("empty"));
    empirical_add(all, 0.5);
    const auto [f2, l2] = trim_window(all);
    CHECK(f2 == 0);
    CHECK(l2 == 0);
}
