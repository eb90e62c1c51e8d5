#pragma once

// Real elliptic curves and their points.
//
// Everything downstream works in the canonical form
//
//     Y^2 = 4 X^3 - g2 X - g3,
//
// reached from the accepted input forms by an affine change of variables:
//
//     short      y^2 = x^3 + a x + b            X = x,            Y = 2 y
//     classical  y^2 = 4 x^3 - g2 x - g3        X = x,            Y = y
//     long       y^2 + a1 x y + a3 y            X = x + b2/12,    Y = 2 y + a1 x + a3
//                    = x^3 + a2 x^2 + a4 x + a6
//
// with b2 = a1^2 + 4 a2.  Coefficients are parsed as exact rationals, so the
// discriminant test and the chord-tangent oracle below are exact whenever the
// inputs are.  Alongside the canonical double/bigreal data every Curve keeps
// an exact long-form model (a1..a6 as rationals) in which integer multiples
// of rational points can be computed with no rounding at all; that model is
// the reference oracle the floating-point orbit code is tested against.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ellorbit/bigreal.hpp"
#include "ellorbit/errors.hpp"

namespace ellorbit {

enum class Component { bounded, unbounded };

// A point in canonical coordinates.  `component` is meaningful only for
// affine points; the point at infinity sits on the unbounded branch.
struct RealPoint {
    double x = 0.0;
    double y = 0.0;
    Component component = Component::unbounded;
    bool at_infinity = false;

    static RealPoint infinity() {
        RealPoint p;
        p.at_infinity = true;
        return p;
    }
};

// Affine change of variables into canonical coordinates:
//   X = x + sx,   Y = u y + v x + w.
// Exact rational coefficients with double mirrors for the hot paths.
struct CoordMap {
    bigrat sx_q{0}, u_q{1}, v_q{0}, w_q{0};
    double sx = 0.0, u = 1.0, v = 0.0, w = 0.0;

    static CoordMap from_rationals(bigrat sx, bigrat u, bigrat v, bigrat w) {
        CoordMap m;
        m.sx = static_cast<double>(to_bigreal(sx));
        m.u = static_cast<double>(to_bigreal(u));
        m.v = static_cast<double>(to_bigreal(v));
        m.w = static_cast<double>(to_bigreal(w));
        m.sx_q = std::move(sx);
        m.u_q = std::move(u);
        m.v_q = std::move(v);
        m.w_q = std::move(w);
        return m;
    }

    std::pair<double, double> to_canonical(double x, double y) const {
        return {x + sx, u * y + v * x + w};
    }
    std::pair<bigrat, bigrat> to_canonical(const bigrat& x, const bigrat& y) const {
        return {x + sx_q, u_q * y + v_q * x + w_q};
    }
    std::pair<double, double> from_canonical(double X, double Y) const {
        const double x = X - sx;
        return {x, (Y - v * x - w) / u};
    }
};

// Exact long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
// over the rationals, with chord-tangent arithmetic.  Used as the rounding-free
// oracle for orbit code; not a performance path.
struct RationalModel {
    bigrat a1{0}, a2{0}, a3{0}, a4{0}, a6{0};
};

struct RationalPoint {
    bigrat x{0}, y{0};
    bool at_infinity = false;

    static RationalPoint infinity() {
        RationalPoint p;
        p.at_infinity = true;
        return p;
    }
};

inline bool on_model(const RationalModel& m, const RationalPoint& p) {
    if (p.at_infinity) return true;
    const bigrat lhs = p.y * p.y + m.a1 * p.x * p.y + m.a3 * p.y;
    const bigrat rhs = p.x * p.x * p.x + m.a2 * p.x * p.x + m.a4 * p.x + m.a6;
    return lhs == rhs;
}

inline RationalPoint negate_exact(const RationalModel& m, const RationalPoint& p) {
    if (p.at_infinity) return p;
    return {p.x, -p.y - m.a1 * p.x - m.a3, false};
}

inline RationalPoint add_exact(const RationalModel& m, const RationalPoint& p,
                               const RationalPoint& q) {
    if (p.at_infinity) return q;
    if (q.at_infinity) return p;
    bigrat lambda, nu;
    if (p.x == q.x) {
        if (q.y == -p.y - m.a1 * p.x - m.a3) return RationalPoint::infinity();
        // tangent line at p (necessarily p == q here)
        const bigrat den = 2 * p.y + m.a1 * p.x + m.a3;
        lambda = (3 * p.x * p.x + 2 * m.a2 * p.x + m.a4 - m.a1 * p.y) / den;
        nu = (-p.x * p.x * p.x + m.a4 * p.x + 2 * m.a6 - m.a3 * p.y) / den;
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
        nu = (p.y * q.x - q.y * p.x) / (q.x - p.x);
    }
    bigrat x3 = lambda * lambda + m.a1 * lambda - m.a2 - p.x - q.x;
    bigrat y3 = -(lambda + m.a1) * x3 - nu - m.a3;
    return {std::move(x3), std::move(y3), false};
}

inline RationalPoint mul_exact(const RationalModel& m, RationalPoint p, unsigned long long n) {
    RationalPoint acc = RationalPoint::infinity();
    while (n) {
        if (n & 1) acc = add_exact(m, acc, p);
        n >>= 1;
        if (n) p = add_exact(m, p, p);
    }
    return acc;
}

namespace curve_detail {

// Real roots of 4x^3 - g2 x - g3, ascending: three when `three_real` says
// the discriminant g2^3 - 27 g3^2 is positive, one otherwise.  The caller
// passes the sign from exact arithmetic; recomputing it here in doubles
// loses it whenever two roots sit close together (the difference cancels
// almost completely while both terms stay huge).  Double precision via the
// trigonometric / Cardano split; these are seeds for the high precision
// polish below, so a collapsed close pair is acceptable.
inline std::vector<double> canonical_roots(double g2, double g3, bool three_real) {
    // divide by 4: x^3 + p x + q with p = -g2/4, q = -g3/4
    const double p = -g2 / 4.0;
    const double q = -g3 / 4.0;
    std::vector<double> roots;
    if (three_real) {
        // three real roots; p < 0 is forced here
        const double r = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * r);
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots.push_back(r * std::cos((theta - 2.0 * M_PI * k) / 3.0));
        std::sort(roots.begin(), roots.end());
    } else {
        // one real root, stable Cardano (avoid cancellation by picking the
        // large-magnitude cube root first)
        const double h = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        const double u3 = (q >= 0.0) ? (-q / 2.0 - h) : (-q / 2.0 + h);
        const double u = std::cbrt(u3);
        double x = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
        // two Newton steps tighten the Cardano seed to full double accuracy
        for (int i = 0; i < 2; ++i) {
            const double f = ((x * x) * x + p * x + q);
            const double df = 3.0 * x * x + p;
            if (df != 0.0) x -= f / df;
        }
        roots.push_back(x);
    }
    return roots;
}

inline bigreal polish_root(const bigreal& g2, const bigreal& g3, bigreal x) {
    for (int i = 0; i < 4; ++i) {
        const bigreal f = ((4 * x * x) * x - g2 * x - g3);
        const bigreal df = 12 * x * x - g2;
        if (df == 0) break;
        x -= f / df;
    }
    return x;
}

inline bigreal polish_root(const bigreal& g2, const bigreal& g3, double seed) {
    return polish_root(g2, g3, bigreal(seed));
}

// Newton-polish the double seeds in high precision.  With three real roots
// two of them can lie so close that the trig seeds coincide; Newton alone
// cannot separate them again.  Polishing the best-conditioned root and
// splitting the deflated quadratic recovers the pair: the quadratic's
// discriminant g2 - 3r^2 is exactly the squared root gap, and the working
// precision has digits to spare for that cancellation.
inline std::vector<bigreal> polished_roots(const bigreal& g2, const bigreal& g3,
                                           const std::vector<double>& seeds) {
    if (seeds.size() == 1) return {polish_root(g2, g3, seeds[0])};

    const double g2d = static_cast<double>(g2);
    double best = seeds[0];
    double best_cond = -1.0;
    for (double s : seeds) {
        const double cond = std::abs(12.0 * s * s - g2d);
        if (cond > best_cond) {
            best_cond = cond;
            best = s;
        }
    }
    const bigreal r = polish_root(g2, g3, best);
    // 4x^3 - g2 x - g3 = 4 (x - r)(x^2 + r x + (r^2 - g2/4))
    bigreal quad_disc = g2 - 3 * r * r;
    if (quad_disc < 0) quad_disc = 0;
    const bigreal gap = sqrt(quad_disc);
    std::vector<bigreal> out{r, polish_root(g2, g3, (-r + gap) / 2),
                             polish_root(g2, g3, (-r - gap) / 2)};
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace curve_detail

struct Curve {
    // canonical invariants
    double g2 = 0.0, g3 = 0.0;
    double disc = 0.0;  // g2^3 - 27 g3^2
    bigreal g2_hi, g3_hi;
    bigrat g2_q{0}, g3_q{0};

    // real roots of 4x^3 - g2 x - g3, ascending (size 1 or 3)
    std::vector<double> roots;
    std::vector<bigreal> roots_hi;
    bool two_components = false;

    // the form the curve was given in, and how to reach canonical coordinates
    std::string form;  // "short", "classical" or "long"
    CoordMap input_map;

    // exact rational long-form model and its map into canonical coordinates
    RationalModel model;
    CoordMap model_map;

    double e_min() const { return roots.front(); }
    double e_mid() const { return roots[1]; }  // only when two_components
    double e_max() const { return roots.back(); }

    // 4x^3 - g2 x - g3, evaluated as 4 times the product of root factors.
    // The expanded form subtracts terms the size of the coefficients, which
    // wipes out the leading digits near a root once the coefficients dwarf
    // the local value; the factored form stays a few ulp everywhere.
    double rhs(double x) const {
        if (roots.size() == 3)
            return 4.0 * (x - roots[0]) * (x - roots[1]) * (x - roots[2]);
        // 4 (x - e0) ((x + e0/2)^2 + q); q > 0 exactly when the other pair
        // is complex, so the clamp only absorbs rounding on near-singular input
        const double t = x + 0.5 * roots[0];
        const double q = std::max(0.0, 0.25 * (3.0 * roots[0] * roots[0] - g2));
        return 4.0 * (x - roots[0]) * (t * t + q);
    }
    bigreal rhs(const bigreal& x) const { return (4 * x * x - g2_hi) * x - g3_hi; }

    // Which component an on-curve x belongs to.  Ties at the inner root go
    // to the bounded branch; the tolerance is relative so large curves with
    // well separated roots behave the same as small ones.
    Component component_of(double x) const {
        if (!two_components) return Component::unbounded;
        const double tol = 1e-9 * std::max(1.0, std::abs(roots[1]));
        return (x <= roots[1] + tol) ? Component::bounded : Component::unbounded;
    }
};

namespace curve_detail {

inline Curve finish_curve(std::string form, bigrat g2_q, bigrat g3_q, CoordMap input_map,
                          RationalModel model, CoordMap model_map) {
    const bigrat disc_q = g2_q * g2_q * g2_q - 27 * g3_q * g3_q;
    if (disc_q == 0) {
        throw validation_error("curve is singular: g2^3 - 27 g3^2 = 0 (g2 = " +
                               g2_q.str() + ", g3 = " + g3_q.str() + ")");
    }
    Curve c;
    c.form = std::move(form);
    c.g2_q = std::move(g2_q);
    c.g3_q = std::move(g3_q);
    c.g2_hi = to_bigreal(c.g2_q);
    c.g3_hi = to_bigreal(c.g3_q);
    c.g2 = static_cast<double>(c.g2_hi);
    c.g3 = static_cast<double>(c.g3_hi);
    c.disc = static_cast<double>(to_bigreal(disc_q));
    c.roots = canonical_roots(c.g2, c.g3, disc_q > 0);
    c.two_components = (c.roots.size() == 3);
    c.roots_hi = polished_roots(c.g2_hi, c.g3_hi, c.roots);
    // fold the polished roots back; matters when g2, g3 are large enough
    // that the double trig formulas lose a few ulps (or a whole close pair)
    for (size_t i = 0; i < c.roots.size(); ++i)
        c.roots[i] = static_cast<double>(c.roots_hi[i]);
    c.input_map = std::move(input_map);
    c.model = std::move(model);
    c.model_map = std::move(model_map);
    return c;
}

}  // namespace curve_detail

inline Curve make_short_curve(bigrat a, bigrat b) {
    // y^2 = x^3 + a x + b;  X = x, Y = 2y gives g2 = -4a, g3 = -4b
    CoordMap map = CoordMap::from_rationals(bigrat(0), bigrat(2), bigrat(0), bigrat(0));
    RationalModel model;
    model.a4 = a;
    model.a6 = b;
    return curve_detail::finish_curve("short", -4 * std::move(a), -4 * std::move(b), map,
                                      std::move(model), map);
}

inline Curve make_classical_curve(bigrat g2, bigrat g3) {
    // already canonical; the exact model keeps the short-form equivalent
    CoordMap input = CoordMap::from_rationals(bigrat(0), bigrat(1), bigrat(0), bigrat(0));
    CoordMap model_map = CoordMap::from_rationals(bigrat(0), bigrat(2), bigrat(0), bigrat(0));
    RationalModel model;
    model.a4 = -g2 / 4;
    model.a6 = -g3 / 4;
    return curve_detail::finish_curve("classical", std::move(g2), std::move(g3), input,
                                      std::move(model), model_map);
}

inline Curve make_long_curve(bigrat a1, bigrat a2, bigrat a3, bigrat a4, bigrat a6) {
    const bigrat b2 = a1 * a1 + 4 * a2;
    const bigrat b4 = a1 * a3 + 2 * a4;
    const bigrat b6 = a3 * a3 + 4 * a6;
    bigrat g2 = (b2 * b2 - 24 * b4) / 12;
    bigrat g3 = (-b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6) / 216;
    CoordMap map = CoordMap::from_rationals(b2 / 12, bigrat(2), a1, a3);
    RationalModel model{std::move(a1), std::move(a2), std::move(a3), std::move(a4), std::move(a6)};
    return curve_detail::finish_curve("long", std::move(g2), std::move(g3), map, std::move(model),
                                      map);
}

// ---------------------------------------------------------------------------
// text parsing

// Exact rational from a decimal or fraction literal: "3", "-2.5", "1e-3",
// "2.5e2", "1/4", "-5/8".  Throws validation_error on anything else.
inline bigrat parse_rational(std::string_view text) {
    auto fail = [&]() -> bigrat {
        throw validation_error("cannot parse number '" + std::string(text) + "'");
    };
    // strip surrounding whitespace
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty()) return fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const std::string num(text.substr(0, slash));
        const std::string den(text.substr(slash + 1));
        if (num.empty() || den.empty()) return fail();
        try {
            bigint p(num), q(den);
            if (q == 0) throw validation_error("zero denominator in '" + std::string(text) + "'");
            return bigrat(p, q);
        } catch (const std::runtime_error&) {
            return fail();
        }
    }

    size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = (text[i] == '-');
        ++i;
    }
    bigint mantissa = 0;
    long frac_digits = 0;
    bool any_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            mantissa = mantissa * 10 + (ch - '0');
            if (seen_dot) ++frac_digits;
            any_digit = true;
        } else if (ch == '.') {
            if (seen_dot) return fail();
            seen_dot = true;
        } else if (ch == 'e' || ch == 'E') {
            break;
        } else {
            return fail();
        }
    }
    if (!any_digit) return fail();
    long exp10 = 0;
    if (i < text.size()) {  // exponent part
        ++i;                // past 'e'
        bool exp_neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_neg = (text[i] == '-');
            ++i;
        }
        if (i == text.size()) return fail();
        for (; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') return fail();
            exp10 = exp10 * 10 + (text[i] - '0');
            if (exp10 > 100000) return fail();
        }
        if (exp_neg) exp10 = -exp10;
    }
    exp10 -= frac_digits;
    bigrat value(mantissa);
    if (exp10 > 0)
        value *= bigrat(boost::multiprecision::pow(bigint(10), static_cast<unsigned>(exp10)));
    else if (exp10 < 0)
        value /= bigrat(boost::multiprecision::pow(bigint(10), static_cast<unsigned>(-exp10)));
    return negative ? -value : value;
}

namespace curve_detail {

inline std::vector<bigrat> parse_rational_list(std::string_view text, size_t expected,
                                               std::string_view what) {
    std::vector<bigrat> out;
    size_t start = 0;
    const std::string s(text);
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        const std::string piece =
            (comma == std::string::npos) ? s.substr(start) : s.substr(start, comma - start);
        out.push_back(parse_rational(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.size() != expected)
        throw validation_error(std::string(what) + " expects " + std::to_string(expected) +
                               " comma-separated values, got " + std::to_string(out.size()));
    return out;
}

}  // namespace curve_detail

// Curve from a spec string: "short:a,b", "classical:g2,g3" or
// "long:a1,a2,a3,a4,a6", coefficients as decimal or p/q literals.
inline Curve parse_curve(std::string_view spec) {
    const size_t colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw validation_error("curve spec '" + std::string(spec) +
                               "' has no form prefix (expected short:, classical: or long:)");
    const std::string_view form = spec.substr(0, colon);
    const std::string_view rest = spec.substr(colon + 1);
    if (form == "short") {
        auto v = curve_detail::parse_rational_list(rest, 2, "short form");
        return make_short_curve(std::move(v[0]), std::move(v[1]));
    }
    if (form == "classical") {
        auto v = curve_detail::parse_rational_list(rest, 2, "classical form");
        return make_classical_curve(std::move(v[0]), std::move(v[1]));
    }
    if (form == "long") {
        auto v = curve_detail::parse_rational_list(rest, 5, "long form");
        return make_long_curve(std::move(v[0]), std::move(v[1]), std::move(v[2]), std::move(v[3]),
                               std::move(v[4]));
    }
    throw validation_error("unknown curve form '" + std::string(form) +
                           "' (expected short, classical or long)");
}

// ---------------------------------------------------------------------------
// points

// Validate and classify a point given in the curve's input coordinates.
inline RealPoint make_point(const Curve& c, double x, double y) {
    auto [X, Y] = c.input_map.to_canonical(x, y);
    const double lhs = Y * Y;
    const double rhs = c.rhs(X);
    const double scale = std::max({1.0, std::abs(lhs), std::abs(4.0 * X * X * X),
                                   std::abs(c.g2 * X), std::abs(c.g3)});
    if (std::abs(lhs - rhs) > 1e-9 * scale)
        throw validation_error("point (" + std::to_string(x) + ", " + std::to_string(y) +
                               ") is not on the curve (residual " + std::to_string(lhs - rhs) +
                               ")");
    RealPoint p;
    p.x = X;
    p.y = Y;
    p.component = c.component_of(X);
    return p;
}

// Exact model point -> canonical double point, classified.
inline RealPoint to_real_point(const Curve& c, const RationalPoint& p) {
    if (p.at_infinity) return RealPoint::infinity();
    auto [Xq, Yq] = c.model_map.to_canonical(p.x, p.y);
    RealPoint out;
    out.x = static_cast<double>(to_bigreal(Xq));
    out.y = static_cast<double>(to_bigreal(Yq));
    out.component = c.component_of(out.x);
    return out;
}

inline RealPoint negate_point(const RealPoint& p) {
    if (p.at_infinity) return p;
    RealPoint q = p;
    q.y = -q.y;
    return q;
}

// Chord-tangent addition in canonical coordinates.  Floating point; the
// exact path above is the oracle this is checked against.
inline RealPoint add_points(const Curve& c, const RealPoint& p, const RealPoint& q) {
    if (p.at_infinity) return q;
    if (q.at_infinity) return p;
    double lambda;
    if (p.x == q.x && p.y == -q.y) return RealPoint::infinity();
    if (p.x == q.x && p.y == q.y) {
        if (p.y == 0.0) return RealPoint::infinity();
        lambda = (12.0 * p.x * p.x - c.g2) / (2.0 * p.y);
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
    }
    const double nu = p.y - lambda * p.x;
    RealPoint r;
    r.x = lambda * lambda / 4.0 - p.x - q.x;
    r.y = -(lambda * r.x + nu);
    r.component = c.component_of(r.x);
    return r;
}

}  // namespace ellorbit
