#pragma once

// Period lattice of a real elliptic curve.
//
// For Y^2 = 4X^3 - g2 X - g3 the lattice is rectangular (disc > 0, periods
// omega1 real and omega2 purely imaginary) or rhombic (disc < 0, omega2 =
// omega1/2 + i h).  Both periods come from arithmetic-geometric means:
//
//   disc > 0, roots e1 < e2 < e3:
//     omega1 = pi / AGM( sqrt(e3 - e1), sqrt(e3 - e2) )
//     omega2 = i pi / AGM( sqrt(e3 - e1), sqrt(e2 - e1) )
//
//   disc < 0, single real root e, A = sqrt(3 e^2 - g2/4):
//     omega1 = pi / ( sqrt(A) AGM(1, sqrt(1/2 + 3e/(4A))) )
//     omega2 = omega1/2 + i pi / ( 2 sqrt(A) AGM(1, sqrt(1/2 - 3e/(4A))) )
//
// The AGM runs in extended precision; doubles are mirrored out afterwards.
// Direct quadrature of dx / sqrt(|4x^3 - g2 x - g3|) over the appropriate
// segments gives the same numbers along a completely different code path,
// which is what the period tests lean on.
//
// The nome q = exp(2 pi i omega2 / omega1) is real in both shapes: positive
// for rectangular lattices, negative for rhombic ones, |q| < 1 always.

#include <array>
#include <cmath>
#include <vector>

#include "ellorbit/bigreal.hpp"
#include "ellorbit/curve.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/quadrature.hpp"

namespace ellorbit {

// AGM with a quadratic-convergence stop rule: once the pair agrees to ~60
// bits, two further iterations land far below the working precision.
template <typename T>
T agm(T a, T b) {
    if (!(a > 0) || !(b > 0)) throw precision_error("agm needs positive arguments");
    const T stop = T(1) / T(bigint(1) << 60);
    for (int i = 0; i < 64; ++i) {
        const T am = (a + b) / 2;
        const T gm = sqrt(a * b);
        const bool close = abs(a - b) <= stop * a;
        a = am;
        b = gm;
        if (close) {
            for (int extra = 0; extra < 2; ++extra) {
                const T am2 = (a + b) / 2;
                const T gm2 = sqrt(a * b);
                a = am2;
                b = gm2;
            }
            return (a + b) / 2;
        }
    }
    throw precision_error("agm failed to converge in 64 iterations");
}

enum class LatticeShape { rectangular, rhombic };

struct Lattice {
    double g2 = 0.0, g3 = 0.0;
    LatticeShape shape = LatticeShape::rectangular;

    double omega1 = 0.0;     // real period
    double omega2_re = 0.0;  // 0 (rectangular) or omega1/2 (rhombic)
    double omega2_im = 0.0;
    double q = 0.0;  // real nome, sign tracks the shape

    bigreal omega1_hi, omega2_im_hi, q_hi;

    // Laurent coefficients of wp about 0: wp(z) = z^-2 + sum c[k] z^(2k-2),
    // k = 2..12.  Slots 0, 1 unused.
    std::array<double, 13> c{};
    std::array<bigreal, 13> c_hi{};

    // terms needed for ~1e-19 q-series tails, and the radius (as a fraction
    // of omega1) inside which the 12-term Laurent expansion is trustworthy
    int series_terms = 0;
    double laurent_window = 0.0;
};

inline Lattice compute_periods(const Curve& curve) {
    const bigreal pi = big_pi();
    Lattice lat;
    lat.g2 = curve.g2;
    lat.g3 = curve.g3;

    bigreal tau_im;        // Im(omega2) / omega1
    if (curve.two_components) {
        lat.shape = LatticeShape::rectangular;
        const bigreal& e1 = curve.roots_hi[0];
        const bigreal& e2 = curve.roots_hi[1];
        const bigreal& e3 = curve.roots_hi[2];
        lat.omega1_hi = pi / agm(sqrt(e3 - e1), sqrt(e3 - e2));
        lat.omega2_im_hi = pi / agm(sqrt(e3 - e1), sqrt(e2 - e1));
        lat.omega2_re = 0.0;
        tau_im = lat.omega2_im_hi / lat.omega1_hi;
        lat.q_hi = exp(-2 * pi * tau_im);
    } else {
        lat.shape = LatticeShape::rhombic;
        const bigreal& e = curve.roots_hi[0];
        const bigreal A = sqrt(3 * e * e - curve.g2_hi / 4);
        const bigreal sA = sqrt(A);
        const bigreal half = bigreal(1) / 2;
        const bigreal ratio = 3 * e / (4 * A);  // in (-1/2, 1/2)
        lat.omega1_hi = pi / (sA * agm(bigreal(1), sqrt(half + ratio)));
        lat.omega2_im_hi = pi / (2 * sA * agm(bigreal(1), sqrt(half - ratio)));
        lat.omega2_re = static_cast<double>(lat.omega1_hi / 2);
        tau_im = lat.omega2_im_hi / lat.omega1_hi;
        lat.q_hi = -exp(-2 * pi * tau_im);
    }
    lat.omega1 = static_cast<double>(lat.omega1_hi);
    lat.omega2_im = static_cast<double>(lat.omega2_im_hi);
    lat.q = static_cast<double>(lat.q_hi);

    // |q| < 0.07 whenever |omega2/omega1| >= 0.85; both shapes make this a
    // near-tautology, so a violation means the periods themselves are wrong
    const double tau_abs = std::hypot(lat.omega2_re / lat.omega1, static_cast<double>(tau_im));
    if (tau_abs >= 0.85 && std::abs(lat.q) >= 0.07)
        throw precision_error("nome guard violated: |q| = " + std::to_string(std::abs(lat.q)));

    // Laurent coefficients: c2 = g2/20, c3 = g3/28, then the convolution
    // recurrence c_k = 3 / ((2k+1)(k-3)) sum_{m=2}^{k-2} c_m c_{k-m}
    lat.c_hi[2] = curve.g2_hi / 20;
    lat.c_hi[3] = curve.g3_hi / 28;
    for (int k = 4; k <= 12; ++k) {
        bigreal s = 0;
        for (int m = 2; m <= k - 2; ++m) s += lat.c_hi[m] * lat.c_hi[k - m];
        lat.c_hi[k] = 3 * s / ((2 * k + 1) * (k - 3));
    }
    for (int k = 2; k <= 12; ++k) lat.c[k] = static_cast<double>(lat.c_hi[k]);

    // series length: the slowest-decaying series carries q^(m/2), so demand
    // |q|^(m/2) below 1e-19 with a couple of spare terms
    const double log_absq = static_cast<double>(log(abs(lat.q_hi)));
    lat.series_terms = static_cast<int>(std::ceil(2.0 * 19.0 * std::log(10.0) / -log_absq)) + 2;

    // Laurent validity: the expansion converges inside the shortest lattice
    // vector; keep the 12-term window where the k = 13 term would sit below
    // ~1e-15 of the leading pole term
    const double r_min =
        std::min(lat.omega1, std::hypot(lat.omega2_re, lat.omega2_im));
    lat.laurent_window = std::min(0.05, 0.30 * r_min / lat.omega1);
    return lat;
}

// Incomplete integrals of dx / sqrt(|4x^3 - g2 x - g3|) with one endpoint
// at a root, shared by the period cross-checks, the distribution law and
// the elliptic logarithm.  Each is written directly in the u = sqrt(|x - e|)
// variable: pushing the raw integrand through integrate_sqrt_left would
// recompute x - e from x = e + u^2 and lose the root neighborhood to
// rounding (ulp(e) noise against a u^2-sized value, fatal once a close
// root pair makes the neighborhood wide).  In the forms below the vanishing
// factor is u^2 by construction and every other factor is a sum, or a
// difference the caller keeps away from zero by splitting at a midpoint.
namespace period_detail {

// Pairwise root gaps folded from the polished roots, so a close pair keeps
// its full relative accuracy instead of the absolute accuracy of the roots.
struct RootGaps {
    double g10 = 0.0;  // e_mid - e_min
    double g20 = 0.0;  // e_max - e_min
    double g21 = 0.0;  // e_max - e_mid
    double q = 0.0;    // one real root e0: rhs = 4 (x - e0) ((x + e0/2)^2 + q)
};

inline RootGaps root_gaps(const Curve& c) {
    RootGaps g;
    if (c.roots_hi.size() == 3) {
        g.g10 = static_cast<double>(c.roots_hi[1] - c.roots_hi[0]);
        g.g20 = static_cast<double>(c.roots_hi[2] - c.roots_hi[0]);
        g.g21 = static_cast<double>(c.roots_hi[2] - c.roots_hi[1]);
    } else {
        g.q = std::max(
            0.0, static_cast<double>((3 * c.roots_hi[0] * c.roots_hi[0] - c.g2_hi) / 4));
    }
    return g;
}

// int_{e_top}^{X} rho with e_top the largest root, for X past the edge but
// below the caller's tail split (rho = 1 / sqrt(rhs)).
inline double rho_axis_head(const Curve& c, const RootGaps& g, double X,
                            const char* what) {
    const double e_top = c.roots.back();
    const double w = std::sqrt(std::max(0.0, X - e_top));
    if (c.roots.size() == 3) {
        auto f = [&](double u) {
            const double uu = u * u;
            return 1.0 / std::sqrt((uu + g.g21) * (uu + g.g20));
        };
        return integrate(f, 0.0, w).checked(what);
    }
    const double e0 = c.roots[0];
    auto f = [&](double u) {
        const double t = u * u + 1.5 * e0;
        return 1.0 / std::sqrt(t * t + g.q);
    };
    return integrate(f, 0.0, w).checked(what);
}

// int_{e_min}^{X} rho inside the bounded lobe, X at or left of the lobe
// midpoint so the far factors stay at least half their full size.
inline double rho_lobe_left(const Curve& c, const RootGaps& g, double X,
                            const char* what) {
    const double w = std::sqrt(std::max(0.0, X - c.e_min()));
    auto f = [&](double u) {
        const double uu = u * u;
        return 1.0 / std::sqrt((g.g10 - uu) * (g.g20 - uu));
    };
    return integrate(f, 0.0, w).checked(what);
}

// int_{X}^{e_mid} rho inside the bounded lobe, X at or right of the midpoint.
inline double rho_lobe_right(const Curve& c, const RootGaps& g, double X,
                             const char* what) {
    const double w = std::sqrt(std::max(0.0, c.e_mid() - X));
    auto f = [&](double u) {
        const double uu = u * u;
        return 1.0 / std::sqrt((g.g10 - uu) * (g.g21 + uu));
    };
    return integrate(f, 0.0, w).checked(what);
}

// int over the gap (e_mid, e_max), where the cubic is negative, against
// 1 / sqrt(-rhs): left half from e_mid up to X, right half from X to e_max.
inline double rho_gap_left(const Curve& c, const RootGaps& g, double X,
                           const char* what) {
    const double w = std::sqrt(std::max(0.0, X - c.e_mid()));
    auto f = [&](double u) {
        const double uu = u * u;
        return 1.0 / std::sqrt((g.g10 + uu) * (g.g21 - uu));
    };
    return integrate(f, 0.0, w).checked(what);
}

inline double rho_gap_right(const Curve& c, const RootGaps& g, double X,
                            const char* what) {
    const double w = std::sqrt(std::max(0.0, c.e_max() - X));
    auto f = [&](double u) {
        const double uu = u * u;
        return 1.0 / std::sqrt((g.g20 - uu) * (g.g21 - uu));
    };
    return integrate(f, 0.0, w).checked(what);
}

}  // namespace period_detail

// Quadrature versions of the periods; an independent check on the AGM path.
// omega1 is the x-integral of 2 / sqrt(4x^3 - g2 x - g3) over the unbounded
// component; over the bounded oval (when present) the same integral gives
// omega1 again, and across the gap between the components, where the cubic
// is negative, it gives |Im omega2|.
inline double omega1_by_quadrature(const Curve& c) {
    const double e_top = c.roots.back();
    const auto g = period_detail::root_gaps(c);
    // closed edge piece up to a fixed split, then the algebraic tail
    const double mid = e_top + std::max(1.0, std::abs(e_top));
    const double head = 2.0 * period_detail::rho_axis_head(c, g, mid, "omega1 head");
    auto f = [&](double x) { return 2.0 / std::sqrt(c.rhs(x)); };
    const double tail = integrate_to_infinity(f, mid, std::max(1.0, std::abs(mid))).checked("omega1 tail");
    return head + tail;
}

inline double omega1_by_bounded_loop(const Curve& c) {
    if (!c.two_components)
        throw validation_error("bounded-loop period needs a two-component curve");
    const auto g = period_detail::root_gaps(c);
    const double mid = (c.e_min() + c.e_mid()) / 2;
    return 2.0 * period_detail::rho_lobe_left(c, g, mid, "loop left") +
           2.0 * period_detail::rho_lobe_right(c, g, mid, "loop right");
}

inline double omega2_im_by_quadrature(const Curve& c) {
    if (!c.two_components)
        throw validation_error("gap integral needs a two-component curve");
    const auto g = period_detail::root_gaps(c);
    const double mid = (c.e_mid() + c.e_max()) / 2;
    return 2.0 * period_detail::rho_gap_left(c, g, mid, "gap left") +
           2.0 * period_detail::rho_gap_right(c, g, mid, "gap right");
}

}  // namespace ellorbit
