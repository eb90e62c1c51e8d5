#pragma once

// The "fruit" puzzle asks for positive integers a, b, c with
//
//     a/(b+c) + b/(c+a) + c/(a+b) = n.
//
// Clearing denominators turns the question into points on the cubic curve
// Y^2 = X^3 + (4n^2 + 12n - 3) X^2 + 32(n+3) X, and a positive triple
// (a, b, c) corresponds to a point whose X coordinate falls inside one of
// two explicit bands on the bounded component.  Solutions therefore appear
// among the multiples of a generator exactly when X(kP) enters a band,
// which the orbit machinery can scan directly.
//
// This header builds the curve for a given n, locates the two bands, and
// computes the statistics attached to them: the fraction of the invariant
// measure they carry (how "rare" solutions are), the observed ratio of the
// two band measures, their euclidean arclengths, and the multiples of a
// supplied generator that land inside.  Band endpoints and integrals live
// in the depressed coordinate x = X + (4n^2 + 12n - 3)/3, which is also the
// canonical X, so orbit samples compare against them without conversion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ellorbit/curve.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/orbit.hpp"
#include "ellorbit/periods.hpp"
#include "ellorbit/quadrature.hpp"

namespace ellorbit {

struct FruitInstance {
    std::int64_t n = 0;

    // The band formulas are algebraically valid for every accepted n, but
    // their reading as "positive solutions live here" is only established
    // for even n >= 4.  Odd n, and the degenerate n = 2 (where the bands
    // tile the whole lobe), keep their numbers with this flag raised.
    bool positivity_unchecked = false;

    double a2 = 0.0;  // X^2 coefficient, 4n^2 + 12n - 3
    double a4 = 0.0;  // X coefficient, 32(n+3)
    double shift = 0.0;  // a2 / 3, the X offset into depressed coordinates

    Curve curve;      // Y^2 = X^3 + a2 X^2 + a4 X, as given
    Curve depressed;  // y^2 = x^3 + ax + b with x = X + shift, y = Y

    double a = 0.0;  // depressed coefficients, rounded from exact rationals
    double b = 0.0;

    // Solution bands in depressed coordinates.  The first band starts
    // exactly at the lobe's left edge (its closed form collapses onto the
    // root because (2n+5)^2 (4n^2+4n-15) is the depressed discriminant
    // gap a2^2 - 4 a4 of the quadratic factor); the second band sits just
    // inside the lobe's right edge and touches it only at n = 2.
    double x1_left = 0.0;
    double x1_right = 0.0;
    double x2_left = 0.0;
    double x2_right = 0.0;
};

// Measure and length of the two bands.  `first` always refers to the band
// at the lobe's left edge.
struct BandIntegrals {
    double first = 0.0;
    double second = 0.0;
};

struct SolutionHits {
    std::vector<std::int64_t> multiples;  // positive k with x(kP) inside a band
    std::int64_t smallest = 0;            // 0 when nothing hit
    double empirical_density = 0.0;       // hits at +-k over the 2 n_max indices
    bool base_unbounded = false;          // generator cannot reach the bands at all
};

inline FruitInstance build_instance(std::int64_t n) {
    // Both square roots in the endpoint formulas must be real.  This drops
    // every n in -2..1; in particular n = 1 has no bands at all.
    if (4 * n * n + 4 * n - 15 < 0 || n * n - 4 < 0)
        throw validation_error("no real solution bands for n = " + std::to_string(n) +
                               " (needs 4n^2+4n-15 >= 0 and n^2-4 >= 0)");
    // Negative n <= -3 would flip the sign of the X coefficient and with it
    // the component layout the band formulas assume.
    if (n < 2)
        throw validation_error("solution bands assume n >= 2 (got n = " + std::to_string(n) + ")");
    // Beyond this the second band (width ~ 8/n at x ~ 4n^2/3) sinks under
    // double rounding of its endpoints.
    if (n > 20000)
        throw validation_error("n above 20000 loses the narrow band to double rounding");

    FruitInstance inst;
    inst.n = n;
    inst.positivity_unchecked = (n % 2 != 0) || (n < 4);

    const bigrat A = bigrat(4 * n * n + 12 * n - 3);
    const bigrat B = bigrat(32 * (n + 3));
    inst.a2 = static_cast<double>(4 * n * n + 12 * n - 3);
    inst.a4 = static_cast<double>(32 * (n + 3));
    inst.shift = inst.a2 / 3.0;

    inst.curve = make_long_curve(bigrat(0), A, bigrat(0), B, bigrat(0));
    const bigrat a_q = B - A * A / 3;
    const bigrat b_q = 2 * A * A * A / 27 - A * B / 3;
    inst.depressed = make_short_curve(a_q, b_q);
    inst.a = static_cast<double>(to_bigreal(a_q));
    inst.b = static_cast<double>(to_bigreal(b_q));

    const double nd = static_cast<double>(n);
    const double s1 = std::sqrt(4.0 * nd * nd + 4.0 * nd - 15.0);
    const double s2 = std::sqrt(nd * nd - 4.0);

    // x1_left's closed form (-a2 - (2n+5) s1) / 2 + shift equals the lobe's
    // left root; the polished root is the better value of the two.
    inst.x1_left = inst.depressed.e_min();
    inst.x1_right = -2.0 * (nd + 3.0) * (nd + s2) + inst.shift;
    // n - s2 cancels catastrophically for large n; 4/(n + s2) is the same
    // number without the subtraction.
    inst.x2_left = -8.0 * (nd + 3.0) / (nd + s2) + inst.shift;
    inst.x2_right = -4.0 * (nd + 3.0) / (nd + 2.0) + inst.shift;

    const double closed_left = (-inst.a2 - (2.0 * nd + 5.0) * s1) / 2.0 + inst.shift;
    const double edge_scale = std::max(1.0, std::abs(inst.x1_left));
    if (std::abs(closed_left - inst.x1_left) > 1e-7 * edge_scale)
        throw precision_error("left band endpoint drifted from the lobe edge");

    const double tol = 1e-9 * std::max(1.0, std::abs(inst.depressed.e_mid()));
    if (!(inst.x1_left < inst.x1_right && inst.x1_right <= inst.x2_left + tol &&
          inst.x2_left < inst.x2_right && inst.x2_right <= inst.depressed.e_mid() + tol))
        throw precision_error("band endpoints lost their ordering for n = " + std::to_string(n));
    return inst;
}

namespace fruit_detail {

// The depressed cubic evaluated as a product over its roots.  The monomial
// form x^3 + ax + b runs through terms of size ~ n^6 while the value on the
// bands is only ~ n^2, so it loses up to ten digits there; the factors are
// all well conditioned.
inline double cubic_from_roots(const Curve& depressed, double x) {
    double v = 1.0;
    for (double e : depressed.roots) v *= (x - e);
    return v;
}

// Whether the second band's right endpoint coincides with the lobe edge.
// That happens exactly at n = 2, where -4(n+3)/(n+2) meets the larger root
// of X^2 + a2 X + a4 and the two bands together tile the whole lobe.
inline bool second_band_hits_edge(const FruitInstance& inst) {
    const double e2 = inst.depressed.e_mid();
    return std::abs(e2 - inst.x2_right) <= 1e-9 * std::max(1.0, std::abs(e2));
}

}  // namespace fruit_detail

// Invariant-measure integrals dx / sqrt(x^3 + ax + b) over the two bands.
//
// Band endpoints at a root get the x = e -+ u^2 substitution, with the
// cubic expanded around that root by hand: the factor (x - e) recomputed
// from x = e + u^2 would quantize to ulp(e) and drown small u in noise,
// while written as u^2 directly it is exact and the substituted integrand
// has no singular factor left at all.
inline BandIntegrals band_measures(const FruitInstance& inst, double rel_tol = 1e-12) {
    const Curve& dep = inst.depressed;
    const double e0 = dep.roots[0];
    const double e1 = dep.roots[1];
    const double e2 = dep.roots[2];

    BandIntegrals out;
    {
        // first band: [e0, x1_right] with x = e0 + u^2
        const double d1 = e1 - e0;
        const double d2 = e2 - e0;
        const auto g = [&](double u) {
            const double uu = u * u;
            return 2.0 / std::sqrt((d1 - uu) * (d2 - uu));
        };
        out.first = integrate(g, 0.0, std::sqrt(inst.x1_right - e0), rel_tol)
                        .checked("first band measure");
    }
    if (fruit_detail::second_band_hits_edge(inst)) {
        // second band ends on the lobe edge: x = e1 - u^2
        const double d0 = e1 - e0;
        const double d2 = e2 - e1;
        const auto g = [&](double u) {
            const double uu = u * u;
            return 2.0 / std::sqrt((d0 - uu) * (d2 + uu));
        };
        out.second = integrate(g, 0.0, std::sqrt(e1 - inst.x2_left), rel_tol)
                         .checked("second band measure");
    } else {
        const auto rho = [&](double x) {
            return 1.0 / std::sqrt(fruit_detail::cubic_from_roots(dep, x));
        };
        out.second = integrate(rho, inst.x2_left, inst.x2_right, rel_tol)
                         .checked("second band measure");
    }
    return out;
}

// Fraction of the orbit of a bounded-component generator that lands in the
// bands: the band measure against the full invariant measure 2 omega1 (the
// lobe itself carries omega1 of it, the unbounded piece the other omega1).
inline double solution_density(const FruitInstance& inst, double rel_tol = 1e-12) {
    const BandIntegrals bi = band_measures(inst, rel_tol);
    const Lattice lat = compute_periods(inst.depressed);
    return (bi.first + bi.second) / (2.0 * lat.omega1);
}

// Observed deviation from the (numerically exact, unproven) identity that
// the first band carries half the measure of the second: |I1 - I2/2| / I2.
inline double conjecture_residual(const FruitInstance& inst, double rel_tol = 1e-12) {
    const BandIntegrals bi = band_measures(inst, rel_tol);
    return std::abs(bi.first - 0.5 * bi.second) / bi.second;
}

// Euclidean arclengths of the curve above the bands.  The first band's arc
// runs through the lobe vertex (x1_left is the root), so the two y-branches
// join into one connected arc; the second band's branches are disjoint.
// Both values are the sum over branches, 2 int sqrt(1 + r'^2 / (4r)) dx,
// with the same substitution treatment at root endpoints as the measures:
// under x = e + u^2 the branch element 2u sqrt(1 + r'^2/(4r)) dx collapses
// to sqrt(4u^2 + r'^2 / q(u)) du where q is the cubic with the vanishing
// factor u^2 divided out.
inline BandIntegrals band_arclengths(const FruitInstance& inst, double rel_tol = 1e-10) {
    const Curve& dep = inst.depressed;
    const double e0 = dep.roots[0];
    const double e1 = dep.roots[1];
    const double e2 = dep.roots[2];
    const auto rp = [&](double x) { return 3.0 * x * x + inst.a; };

    BandIntegrals out;
    {
        const double d1 = e1 - e0;
        const double d2 = e2 - e0;
        const auto g = [&](double u) {
            const double uu = u * u;
            const double slope = rp(e0 + uu);
            return std::sqrt(4.0 * uu + slope * slope / ((d1 - uu) * (d2 - uu)));
        };
        out.first = 2.0 *
                    integrate(g, 0.0, std::sqrt(inst.x1_right - e0), rel_tol)
                        .checked("first band arclength");
    }
    if (fruit_detail::second_band_hits_edge(inst)) {
        const double d0 = e1 - e0;
        const double d2 = e2 - e1;
        const auto g = [&](double u) {
            const double uu = u * u;
            const double slope = rp(e1 - uu);
            return std::sqrt(4.0 * uu + slope * slope / ((d0 - uu) * (d2 + uu)));
        };
        out.second = 2.0 *
                     integrate(g, 0.0, std::sqrt(e1 - inst.x2_left), rel_tol)
                         .checked("second band arclength");
    } else {
        const auto arc = [&](double x) {
            const double r = fruit_detail::cubic_from_roots(dep, x);
            const double slope = rp(x);
            return std::sqrt(1.0 + slope * slope / (4.0 * r));
        };
        out.second = 2.0 *
                     integrate(arc, inst.x2_left, inst.x2_right, rel_tol)
                         .checked("second band arclength");
    }
    return out;
}

// Scan the multiples kP, k = 1..n_max, of a generator on the given curve
// and report which land inside a band.  x(-kP) = x(kP), so each hit counts
// its mirror too and the empirical density is hits over 2 n_max.  A
// generator on the unbounded component never reaches the bands (they sit
// on the lobe); that comes back flagged rather than as an empty search.
inline SolutionHits solution_multiples(const FruitInstance& inst, const RealPoint& p,
                                       std::int64_t n_max) {
    if (n_max < 1)
        throw validation_error("solution scan needs n_max >= 1");
    SolutionHits out;
    const Orbit orb = make_orbit(inst.curve, p);
    if (!orb.bounded_base()) {
        out.base_unbounded = true;
        return out;
    }
    orbit_scan(orb, n_max, [&](const OrbitSample& s) {
        if (s.at_infinity) return;  // pole guard hit: x is huge, off the lobe
        const bool hit = (s.x >= inst.x1_left && s.x <= inst.x1_right) ||
                         (s.x >= inst.x2_left && s.x <= inst.x2_right);
        if (hit) out.multiples.push_back(s.n);
    });
    if (!out.multiples.empty()) out.smallest = out.multiples.front();
    out.empirical_density =
        static_cast<double>(out.multiples.size()) / static_cast<double>(n_max);
    return out;
}

}  // namespace ellorbit
