#pragma once

// Weierstrass functions on the real locus, torus coordinates, and the
// elliptic logarithm.
//
// Points are addressed by where they sit on the real torus: a fraction t of
// the real period plus an optional half-period shift,
//
//     z = t omega1                (unbounded component, "axis row")
//     z = t omega1 + omega2 / 2   (bounded component, rectangular only)
//
// t is held as an exact 192-bit fraction (Frac192), so the group law on the
// curve collapses to exact integer arithmetic mod 1.  The q-series below
// evaluate wp and wp' on both rows; they stay fully accurate arbitrarily
// close to the pole because the leading 1/sin^2 term is computed from the
// signed distance to the nearest integer at full relative precision.  There
// is no cancellation anywhere: every other term of the series is O(1).
//
// With t error below 2^-190 and n up to ~10^9, the fractional part of n t is
// still good to ~2^-160, which keeps orbit scans honest; anything closer to
// the pole than 2^-160 is reported as the point at infinity rather than as a
// garbage coordinate.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "ellorbit/bigreal.hpp"
#include "ellorbit/curve.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/frac192.hpp"
#include "ellorbit/periods.hpp"
#include "ellorbit/quadrature.hpp"

namespace ellorbit {

// Distances below this are indistinguishable from the pole at our precision.
constexpr long double kPoleDist = 0x1p-160L;

struct TorusCoord {
    Frac192 t;
    bool half_shift = false;  // true: bounded row (z = t omega1 + omega2/2)
};

inline TorusCoord torus_add(const TorusCoord& a, const TorusCoord& b) {
    return {a.t + b.t, a.half_shift != b.half_shift};
}

// -(t omega1 + omega2/2) == (-t) omega1 + omega2/2 modulo the lattice,
// so negation keeps the shift.
inline TorusCoord torus_negate(const TorusCoord& a) { return {a.t.negated(), a.half_shift}; }

inline TorusCoord torus_mul(const TorusCoord& a, std::uint64_t n) {
    return {a.t.times(n), a.half_shift && (n & 1)};
}

inline TorusCoord torus_mul_signed(const TorusCoord& a, long long n) {
    if (n >= 0) return torus_mul(a, static_cast<std::uint64_t>(n));
    return torus_negate(torus_mul(a, static_cast<std::uint64_t>(-n)));
}

// wp and wp' at z = s omega1 (axis row, s the signed distance to the nearest
// integer) or z = s omega1 + omega2/2 (shifted row).  Fourier q-series:
//
//   axis:    wp  = (pi/w1)^2 [ 1/sin^2(pi s) - 1/3
//                              + 8 sum m q^m (1 - cos(2 pi m s)) / (1-q^m) ]
//            wp' = (pi/w1)^3 [ -2 cos(pi s)/sin^3(pi s)
//                              + 16 sum m^2 q^m sin(2 pi m s) / (1-q^m) ]
//
//   shifted: wp  = (pi/w1)^2 [ -1/3 - 8 sum m (q^(m/2) cos(2 pi m s) - q^m)
//                                            / (1-q^m) ]
//            wp' = (pi/w1)^3 [ 16 sum m^2 q^(m/2) sin(2 pi m s) / (1-q^m) ]
//
// The shifted row requires a rectangular lattice (q > 0).  The sign
// conventions fall out automatically: on the axis row wp' < 0 for s in
// (0, 1/2); on the shifted row wp' > 0 there.
inline std::pair<double, double> wp_pair_at(const Lattice& lat, long double s, bool shifted) {
    const double w1 = lat.omega1;
    const double pw = M_PI / w1;
    const double pw2 = pw * pw;
    const double pw3 = pw2 * pw;
    const double q = lat.q;

    // angle recurrence for cos/sin(2 pi m s), resynced every 64 terms
    const double sd = static_cast<double>(s);
    const double c1 = std::cos(2.0 * M_PI * sd);
    const double s1 = std::sin(2.0 * M_PI * sd);
    double cm = c1, sm = s1;

    double sum_x = 0.0, sum_y = 0.0;
    if (!shifted) {
        double qm = q;
        for (int m = 1; m <= lat.series_terms; ++m) {
            const double den = 1.0 - qm;
            sum_x += m * qm * (1.0 - cm) / den;
            sum_y += static_cast<double>(m) * m * qm * sm / den;
            qm *= q;
            if ((m & 63) == 0) {
                cm = std::cos(2.0 * M_PI * (m + 1) * sd);
                sm = std::sin(2.0 * M_PI * (m + 1) * sd);
            } else {
                const double cn = cm * c1 - sm * s1;
                sm = sm * c1 + cm * s1;
                cm = cn;
            }
        }
        // the pole terms, at full relative accuracy in long double
        constexpr long double pi_l = 3.141592653589793238462643383279502884L;
        const long double sp = std::sin(pi_l * s);
        const long double cp = std::cos(pi_l * s);
        const long double inv_sin2 = 1.0L / (sp * sp);
        const long double x = pw2 * (inv_sin2 - 1.0L / 3.0L + 8.0L * sum_x);
        const long double y = pw3 * (-2.0L * cp * inv_sin2 / sp + 16.0L * sum_y);
        return {static_cast<double>(x), static_cast<double>(y)};
    }

    if (lat.shape != LatticeShape::rectangular)
        throw validation_error("bounded row requested on a one-component curve");
    const double sq = std::sqrt(q);
    double qm = q, sqm = sq;
    for (int m = 1; m <= lat.series_terms; ++m) {
        const double den = 1.0 - qm;
        sum_x += m * (sqm * cm - qm) / den;
        sum_y += static_cast<double>(m) * m * sqm * sm / den;
        qm *= q;
        sqm *= sq;
        if ((m & 63) == 0) {
            cm = std::cos(2.0 * M_PI * (m + 1) * sd);
            sm = std::sin(2.0 * M_PI * (m + 1) * sd);
        } else {
            const double cn = cm * c1 - sm * s1;
            sm = sm * c1 + cm * s1;
            cm = cn;
        }
    }
    return {pw2 * (-1.0 / 3.0 - 8.0 * sum_x), pw3 * 16.0 * sum_y};
}

// Same series in extended precision; t is taken mod 1 directly (no pole
// subtlety needed: the callers stay away from t = 0 on the axis row).
inline std::pair<bigreal, bigreal> wp_pair_hi(const Lattice& lat, const bigreal& t, bool shifted) {
    const bigreal pi = big_pi();
    const bigreal pw = pi / lat.omega1_hi;
    const bigreal pw2 = pw * pw;
    const bigreal pw3 = pw2 * pw;
    const bigreal q = lat.q_hi;
    const int terms = lat.series_terms + lat.series_terms / 2 + 8;

    bigreal sum_x = 0, sum_y = 0;
    if (!shifted) {
        bigreal qm = q;
        for (int m = 1; m <= terms; ++m) {
            const bigreal ang = 2 * pi * m * t;
            const bigreal den = 1 - qm;
            sum_x += m * qm * (1 - cos(ang)) / den;
            sum_y += bigreal(m) * m * qm * sin(ang) / den;
            qm *= q;
        }
        const bigreal sp = sin(pi * t);
        const bigreal cp = cos(pi * t);
        const bigreal inv_sin2 = 1 / (sp * sp);
        return {pw2 * (inv_sin2 - bigreal(1) / 3 + 8 * sum_x),
                pw3 * (-2 * cp * inv_sin2 / sp + 16 * sum_y)};
    }

    if (lat.shape != LatticeShape::rectangular)
        throw validation_error("bounded row requested on a one-component curve");
    const bigreal sq = sqrt(q);
    bigreal qm = q, sqm = sq;
    for (int m = 1; m <= terms; ++m) {
        const bigreal ang = 2 * pi * m * t;
        const bigreal den = 1 - qm;
        sum_x += m * (sqm * cos(ang) - qm) / den;
        sum_y += bigreal(m) * m * sqm * sin(ang) / den;
        qm *= q;
        sqm *= sq;
    }
    return {pw2 * (bigreal(-1) / 3 - 8 * sum_x), pw3 * 16 * sum_y};
}

// Laurent expansion about the pole, z = s omega1 with |s| small:
//   wp  = z^-2 + sum_{k=2..12} c_k z^(2k-2)
//   wp' = -2 z^-3 + sum_{k=2..12} (2k-2) c_k z^(2k-3)
// Valid for |s| <= lat.laurent_window; used as an independent cross-check on
// the q-series and to fit pole-approach error constants without cancellation.
inline std::pair<double, double> laurent_wp_pair(const Lattice& lat, double s) {
    const double z = s * lat.omega1;
    const double z2 = z * z;
    double px = 0.0, py = 0.0;
    for (int k = 12; k >= 2; --k) {
        px = px * z2 + lat.c[k];
        py = py * z2 + (2 * k - 2) * lat.c[k];
    }
    px *= z2;              // sum c_k z^(2k-2)
    py *= z;               // sum (2k-2) c_k z^(2k-3)
    return {1.0 / z2 + px, -2.0 / (z2 * z) + py};
}

// The deviation of wp from its pole term, wp(z) - z^-2, and likewise
// wp' + 2 z^-3, evaluated without cancellation (series only).
inline std::pair<double, double> laurent_deviation(const Lattice& lat, double s) {
    const double z = s * lat.omega1;
    const double z2 = z * z;
    double px = 0.0, py = 0.0;
    for (int k = 12; k >= 2; --k) {
        px = px * z2 + lat.c[k];
        py = py * z2 + (2 * k - 2) * lat.c[k];
    }
    return {px * z2, py * z};
}

// ---------------------------------------------------------------------------
// torus -> curve

inline RealPoint point_from_torus(const Curve& curve, const Lattice& lat, const TorusCoord& tc) {
    if (!tc.half_shift && tc.t.dist_to_int() < kPoleDist) return RealPoint::infinity();
    const long double s = tc.t.signed_dist_to_int();
    auto [x, y] = wp_pair_at(lat, s, tc.half_shift);
    RealPoint p;
    p.x = x;
    p.y = y;
    p.component = tc.half_shift ? Component::bounded : Component::unbounded;
    (void)curve;
    return p;
}

// ---------------------------------------------------------------------------
// curve -> torus (elliptic logarithm)

namespace wp_detail {

// Quadrature seed for the half-row parameter t in (0, 1/2]:
// unbounded X: t = (1/omega1) * int_X^inf dx / sqrt(4x^3 - g2 x - g3)
// bounded   X: t = (1/omega1) * int_{e1}^X  dx / sqrt(4x^3 - g2 x - g3)
inline double log_seed(const Curve& c, const Lattice& lat, double X, bool bounded) {
    // points arriving a rounding error outside their component still count
    if (bounded)
        X = std::clamp(X, c.roots[0], c.roots[1]);
    else
        X = std::max(X, c.roots.back());
    const auto gaps = period_detail::root_gaps(c);
    double z;
    if (!bounded) {
        const double e_top = c.roots.back();
        const double cut = e_top + std::max(1.0, std::abs(e_top));
        if (X <= cut) {
            z = lat.omega1 / 2 -
                period_detail::rho_axis_head(c, gaps, X, "log seed");
        } else {
            auto rho = [&](double x) { return 1.0 / std::sqrt(c.rhs(x)); };
            z = integrate_to_infinity(rho, X, std::max(1.0, std::abs(X))).checked("log seed");
        }
    } else {
        const double mid = (c.roots[0] + c.roots[1]) / 2;
        if (X <= mid) {
            z = period_detail::rho_lobe_left(c, gaps, X, "log seed");
        } else {
            z = lat.omega1 / 2 -
                period_detail::rho_lobe_right(c, gaps, X, "log seed");
        }
    }
    return z / lat.omega1;
}

// Safeguarded Newton for wp(t-row) = X on the half-row (0, 1/2], in extended
// precision.  wp is strictly monotone there (decreasing on the axis row,
// increasing on the shifted row), so a bracket plus Newton-with-bisection
// always lands; near the 2-torsion endpoints, where wp' -> 0, the bisection
// half takes over.
inline bigreal polish_log(const Lattice& lat, const bigreal& X, double seed, bool shifted) {
    const bigreal half = bigreal(1) / 2;
    const bigreal t_eps = bigreal(1) / bigreal(bigint(1) << 191);
    bigreal lo(std::max(seed - 1e-6, 1e-300));
    bigreal hi(std::min(seed + 1e-6, 0.5));
    const int sign = shifted ? +1 : -1;  // sign of d(wp)/dt * (X increasing?)
    // widen the bracket until wp(lo) and wp(hi) straddle X
    auto value = [&](const bigreal& t) { return wp_pair_hi(lat, t, shifted).first - X; };
    bigreal flo = value(lo), fhi = value(hi);
    for (int i = 0; i < 700 && flo * fhi > 0; ++i) {
        // axis row: wp decreasing, so f(lo) > 0 > f(hi) eventually
        if ((sign < 0 && flo < 0) || (sign > 0 && flo > 0)) {
            hi = lo;
            fhi = flo;
            lo = lo / 2;
            flo = value(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi = (hi + half) / 2 + (half - hi) / 4;  // step toward 1/2
            if (hi > half) hi = half;
            fhi = value(hi);
        }
        if (hi == half && lo == half) break;
    }
    if (flo * fhi > 0) throw precision_error("elliptic log: failed to bracket the target x");

    bigreal t = bigreal(seed);
    if (t <= lo || t >= hi) t = (lo + hi) / 2;
    for (int it = 0; it < 300; ++it) {
        auto [w, wd] = wp_pair_hi(lat, t, shifted);
        const bigreal f = w - X;
        // shrink the bracket with the new sign information
        if ((f > 0) == (flo > 0)) {
            lo = t;
            flo = f;
        } else {
            hi = t;
            fhi = f;
        }
        bigreal step;
        const bigreal dfdt = wd * lat.omega1_hi;
        bool use_newton = (dfdt != 0);
        if (use_newton) {
            step = f / dfdt;
            const bigreal tn = t - step;
            if (tn <= lo || tn >= hi) use_newton = false;
        }
        t = use_newton ? t - step : (lo + hi) / 2;
        if (hi - lo <= t_eps) return (lo + hi) / 2;
        if (use_newton && abs(step) <= t_eps) return t;
    }
    throw precision_error("elliptic log: polish failed to converge");
}

}  // namespace wp_detail

inline TorusCoord elliptic_log(const Curve& curve, const Lattice& lat, const RealPoint& p) {
    if (p.at_infinity) return {Frac192::zero(), false};
    const bool bounded = (p.component == Component::bounded);
    if (bounded && !curve.two_components)
        throw validation_error("bounded point on a one-component curve");

    double t_half;  // parameter on the half-row (0, 1/2]
    // 2-torsion points sit at the ends of the half-rows; handle them exactly
    const double root_tol = 1e-12 * std::max(1.0, std::abs(p.x));
    if (!bounded && std::abs(p.x - curve.roots.back()) <= root_tol && p.y == 0.0) {
        TorusCoord tc;
        tc.t = Frac192::from_rational(bigint(1), bigint(2));
        return tc;
    }
    if (bounded && std::abs(p.x - curve.roots[0]) <= root_tol && p.y == 0.0)
        return {Frac192::zero(), true};
    if (bounded && std::abs(p.x - curve.roots[1]) <= root_tol && p.y == 0.0) {
        TorusCoord tc;
        tc.t = Frac192::from_rational(bigint(1), bigint(2));
        tc.half_shift = true;
        return tc;
    }

    const double seed = wp_detail::log_seed(curve, lat, p.x, bounded);
    const bigreal t_hat = wp_detail::polish_log(lat, bigreal(p.x), seed, bounded);

    // reflect onto the full row by the sign of y: on the axis row y < 0
    // for t in (0, 1/2), on the shifted row y > 0 there
    const bool keep = bounded ? (p.y >= 0.0) : (p.y <= 0.0);
    const bigreal t_full = keep ? t_hat : 1 - t_hat;
    return {Frac192::from_bigreal(t_full), bounded};
}

// ---------------------------------------------------------------------------
// pole-approach error constants

// Constants C_x, C_y with |wp(s) - (omega1 s)^-2| <= C_x s^2 and
// |wp'(s) + sgn(s) 2 (omega1 |s|)^-3| <= C_y |s| for all 0 < |s| <= 1/2 on
// the axis row.  Inside the Laurent window the deviation is summed directly
// (no cancellation); outside it the q-series value is compared against the
// pole term.  A 10 percent margin absorbs grid effects.
struct TailBounds {
    double cx = 0.0;
    double cy = 0.0;
};

inline TailBounds fit_tail_bounds(const Lattice& lat) {
    TailBounds tb;
    auto consider = [&](double s, double dev_x, double dev_y) {
        tb.cx = std::max(tb.cx, std::abs(dev_x) / (s * s));
        tb.cy = std::max(tb.cy, std::abs(dev_y) / s);
    };
    // series region: geometric sweep up to the Laurent window
    const double w = lat.laurent_window;
    for (double s = 1e-7; s < w; s *= 1.12) {
        auto [dx, dy] = laurent_deviation(lat, s);
        consider(s, dx, dy);
    }
    // q-series region: [w, 1/2], uniform sweep
    const int n = 600;
    for (int i = 0; i <= n; ++i) {
        const double s = w + (0.5 - w) * i / n;
        auto [x, y] = wp_pair_at(lat, s, false);
        const double z = s * lat.omega1;
        consider(s, x - 1.0 / (z * z), y + 2.0 / (z * z * z));
    }
    tb.cx *= 1.10;
    tb.cy *= 1.10;
    return tb;
}

// ---------------------------------------------------------------------------
// torsion screen

// Smallest q <= q_max with q * tc indistinguishable from the lattice origin
// at our precision, or 0 if none. Points this close to torsion make every
// equidistribution statement vacuous, so orbit entry points reject them.
inline unsigned torsion_order_screen(const TorusCoord& tc, unsigned q_max = 12) {
    for (unsigned q = 1; q <= q_max; ++q) {
        const TorusCoord m = torus_mul(tc, q);
        if (!m.half_shift && m.t.dist_to_int() < kPoleDist) return q;
    }
    return 0;
}

}  // namespace ellorbit
