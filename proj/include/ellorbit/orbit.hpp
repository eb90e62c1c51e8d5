#pragma once

// Integer-multiple orbits nP on the torus line.  The orbit stores the
// elliptic logarithm of the base point once, as an exact 192-bit fraction
// of the real period; every multiple is then one fixed-point multiplication
// {n t} followed by a wp evaluation.  Iterated chord-tangent arithmetic is
// never used here: it loses all significance the first time an intermediate
// multiple lands near a pole, while the torus step keeps |{n t}| correct to
// n * 2^-192 (< 2^-162 over the whole admissible index range).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ellorbit/curve.hpp"
#include "ellorbit/diophantine.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/frac192.hpp"
#include "ellorbit/periods.hpp"
#include "ellorbit/weierstrass.hpp"

namespace ellorbit {

// Largest |n| an orbit accepts.  At this range the accumulated carrier error
// n * 2^-192 stays below 2^-162, far inside the 2^-120 budget the scan
// statistics assume.
inline constexpr std::int64_t kMaxOrbitIndex = 1'000'000'000;

struct Orbit {
    Curve curve;
    Lattice lattice;
    TorusCoord zP;   // fractional position of P: z_P = t*omega1 (+ omega2/2 on the bounded row)
    RealPoint base;  // P in canonical coordinates
    TailBounds tails;

    bool bounded_base() const { return zP.half_shift; }
};

// Certified floor for samples the pole guard absorbed: once {n t} is closer
// to an integer than the carrier resolves, the true canonical x exceeds
// (omega1 s)^-2 - C_x s^2 at s = kPoleDist, and |Y| exceeds the cubic
// analogue.  Both still fit comfortably in a double (about 1e96 and 1e145),
// so scans can treat saturated samples as finite, honestly lower-bounded
// values instead of infinities.
inline double infinity_floor_x(const Orbit& orb) {
    const double inv = 1.0 / (orb.lattice.omega1 * static_cast<double>(kPoleDist));
    return inv * inv - orb.tails.cx;
}

inline double infinity_floor_y(const Orbit& orb) {
    const double inv = 1.0 / (orb.lattice.omega1 * static_cast<double>(kPoleDist));
    return 2.0 * inv * inv * inv - orb.tails.cy;
}

inline Orbit make_orbit(const Curve& curve, const RealPoint& p) {
    if (p.at_infinity) throw validation_error("orbit base point must be finite");

    Orbit orb;
    orb.curve = curve;
    orb.lattice = compute_periods(curve);
    orb.zP = elliptic_log(curve, orb.lattice, p);
    orb.base = p;
    orb.tails = fit_tail_bounds(orb.lattice);

    // Torsion of order <= 12 makes every statistic below degenerate (the
    // orbit revisits finitely many points), and it is detectable exactly:
    // q*t collapses onto the carrier grid origin.  Beyond that, infinite
    // order is the caller's claim; it is not decidable from a real point.
    if (const unsigned q = torsion_order_screen(orb.zP))
        throw validation_error("base point is torsion of order " + std::to_string(q) +
                               "; orbit statistics need a point of infinite order");

    const RealPoint back = point_from_torus(curve, orb.lattice, orb.zP);
    const double xs = std::max(1.0, std::abs(p.x));
    const double ys = std::max(1.0, std::abs(p.y));
    if (back.at_infinity || std::abs(back.x - p.x) > 1e-9 * xs ||
        std::abs(back.y - p.y) > 1e-9 * ys)
        throw precision_error("elliptic log round trip failed to reproduce the base point");
    return orb;
}

// nP in canonical coordinates.  n = 0, and any n whose torus position falls
// inside the pole guard, comes back with at_infinity set.
inline RealPoint nth_point_canonical(const Orbit& orb, std::int64_t n) {
    if (n < -kMaxOrbitIndex || n > kMaxOrbitIndex)
        throw validation_error("multiple index out of range (|n| <= 1e9)");
    return point_from_torus(orb.curve, orb.lattice, torus_mul_signed(orb.zP, n));
}

// Same point in the coordinates the curve was given in.
inline RealPoint nth_point(const Orbit& orb, std::int64_t n) {
    RealPoint p = nth_point_canonical(orb, n);
    if (p.at_infinity) return p;
    const auto [x, y] = orb.curve.input_map.from_canonical(p.x, p.y);
    p.x = x;
    p.y = y;
    return p;
}

// One visited multiple.  Coordinates are canonical; at_infinity marks
// samples the pole guard absorbed (use the orbit's infinity floors for a
// certified magnitude).
struct OrbitSample {
    std::int64_t n = 0;
    Frac192 t;                 // {n t_P}, exact carrier value
    long double dist = 0.0L;   // distance of t to the nearest integer
    double x = 0.0;
    double y = 0.0;
    bool half_shift = false;   // sample sits on the bounded row
    bool at_infinity = false;
};

// Visits n = first..last inclusive.  The torus position advances by exact
// additions, and the carrier makes a chain of additions bit-identical to a
// direct multiplication, so a scan split into subranges and merged visits
// exactly the samples of the single-range scan.  Integer accumulators
// therefore merge deterministically; compensated real accumulators agree to
// their own rounding.
template <typename Visitor>
inline void orbit_scan(const Orbit& orb, std::int64_t first, std::int64_t last, Visitor&& visit) {
    if (first > last) throw validation_error("orbit scan range is empty");
    if (first < -kMaxOrbitIndex || last > kMaxOrbitIndex)
        throw validation_error("orbit scan range exceeds |n| <= 1e9");

    TorusCoord tc = torus_mul_signed(orb.zP, first);
    for (std::int64_t n = first;; ++n) {
        OrbitSample s;
        s.n = n;
        s.t = tc.t;
        s.half_shift = tc.half_shift;
        s.dist = tc.t.dist_to_int();
        const RealPoint p = point_from_torus(orb.curve, orb.lattice, tc);
        if (p.at_infinity) {
            s.at_infinity = true;
        } else {
            s.x = p.x;
            s.y = p.y;
        }
        visit(s);
        if (n == last) break;
        tc = torus_add(tc, orb.zP);
    }
}

template <typename Visitor>
inline void orbit_scan(const Orbit& orb, std::int64_t n_max, Visitor&& visit) {
    orbit_scan(orb, 1, n_max, std::forward<Visitor>(visit));
}

// Ready-made accumulators for the scan driver.  All counters are exact
// integers, so partition merges commute and associate.

struct CountingAccumulator {
    std::uint64_t visited = 0;
    std::uint64_t at_infinity = 0;

    void operator()(const OrbitSample& s) {
        ++visited;
        if (s.at_infinity) ++at_infinity;
    }
    void merge(const CountingAccumulator& o) {
        visited += o.visited;
        at_infinity += o.at_infinity;
    }
};

// Fixed-edge histogram over [lo, hi) with uniform bins; values outside the
// window go to the under/over counters so no sample is silently dropped.
struct Histogram {
    double lo = 0.0, hi = 1.0;
    std::vector<std::uint64_t> bins;
    std::uint64_t below = 0, above = 0, saturated = 0;

    Histogram(double lo_, double hi_, std::size_t n_bins) : lo(lo_), hi(hi_), bins(n_bins, 0) {
        if (!(lo_ < hi_) || n_bins == 0) throw validation_error("histogram needs lo < hi and at least one bin");
    }

    void add(double v) {
        if (v < lo) {
            ++below;
        } else if (v >= hi) {
            ++above;
        } else {
            const auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins.size()));
            ++bins[std::min(i, bins.size() - 1)];
        }
    }
    void add_saturated() { ++saturated; }

    void merge(const Histogram& o) {
        if (o.bins.size() != bins.size() || o.lo != lo || o.hi != hi)
            throw validation_error("histogram merge needs identical binning");
        for (std::size_t i = 0; i < bins.size(); ++i) bins[i] += o.bins[i];
        below += o.below;
        above += o.above;
        saturated += o.saturated;
    }

    std::uint64_t total() const {
        std::uint64_t t = below + above + saturated;
        for (const auto b : bins) t += b;
        return t;
    }
};

// ---------------------------------------------------------------------------
// pole-approach growth along the orbit

// One index whose multiple clears (or was tested against) the quadratic
// lower bound.  x and y_abs are canonical; when the carrier saturated they
// hold the certified floors instead of evaluated values.
struct GrowthWitness {
    std::int64_t n = 0;
    double x = 0.0;
    double x_bound = 0.0;
    double y_abs = 0.0;
    double y_bound = 0.0;
    bool y_ok = false;     // |Y(nP)| clears the cubic bound too
    bool hurwitz = false;  // sqrt(5) * m * {m step} < 1 for the sub-orbit index m
    bool saturated = false;
};

struct GrowthReport {
    // bound(n) = coeff_x n^2 - cx n^-2 on x, coeff_y n^3 - cy n^-1 on |Y|
    double coeff_x = 0.0;
    double coeff_y = 0.0;
    double cx = 0.0;  // fitted tail constants: engineering stand-ins for the
    double cy = 0.0;  // untracked lower-order terms, not sharp constants
    int stride = 1;   // 2 when the base point is bounded (witnesses are even multiples)
    std::vector<GrowthWitness> witnesses;
};

namespace orbit_detail {

// Sub-orbit indices m that could possibly push x(m Q) above
// coeff m^2 - C m^-2.  Head: every m up to the brute cutoff.  Tail:
// multiples of continued-fraction denominators of the step, kept while
// sqrt(5) * m * {m step} < 1.12.  Passing the bound past the cutoff forces
// {m step} < (1 + 5e-13)/(sqrt(5) m), an approximation good enough that m
// must be a multiple of a convergent denominator, so the tail set is
// exhaustive there; the 12 percent slack is orders of magnitude more than
// the C m^-2 term can ever buy back.
inline std::vector<std::uint64_t> growth_candidates(const Frac192& step, std::uint64_t m_max) {
    constexpr std::uint64_t kBruteCutoff = 10'000;
    constexpr long double kSlack = 1.12L;
    const long double root5 = sqrtl(5.0L);

    std::vector<std::uint64_t> out;
    const std::uint64_t head = std::min(m_max, kBruteCutoff);
    out.reserve(head + 64);
    for (std::uint64_t m = 1; m <= head; ++m) out.push_back(m);

    if (m_max > kBruteCutoff) {
        const ContinuedFraction cf = continued_fraction_to_budget(step);
        for (std::size_t k = 0; k < cf.q.size(); ++k) {
            if (cf.q[k] > m_max) break;
            const std::uint64_t qk = cf.q[k].convert_to<std::uint64_t>();
            const long double dk = frac_dist(step, qk);
            for (std::uint64_t j = 1; j * qk <= m_max; ++j) {
                const long double dj = dk * static_cast<long double>(j);
                // j*dk is the exact distance while it stays under 1/2, and
                // m*dj grows monotonically with j there; approximations that
                // wrap past 1/2 belong to a later denominator's loop.
                if (dj >= 0.5L || root5 * dj * static_cast<long double>(j * qk) >= kSlack) break;
                if (j * qk > kBruteCutoff) out.push_back(j * qk);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

struct GrowthFrame {
    TorusCoord step;     // zP, or 2 zP for a bounded base
    int stride = 1;
    double coeff_x = 0.0;
    double coeff_y = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};

// Theorem constants for the pole-approach bound.  A bounded base point never
// leaves the bounded row on odd multiples, so the unbounded statement runs
// through the doubled point: witnesses are even, and with n = 2m the
// sub-orbit bound 5 m^2/w1^2 becomes 5 n^2/(4 w1^2) (cubes pick up 1/8).
// The slack terms keep the plain C n^-2 and C n^-1 shape in both cases
// since {m step} < 1/(sqrt(5) m) makes them only smaller.
inline GrowthFrame growth_frame(const Orbit& orb) {
    GrowthFrame fr;
    const double w1 = orb.lattice.omega1;
    const double root5 = std::sqrt(5.0);
    fr.cx = orb.tails.cx;
    fr.cy = orb.tails.cy;
    if (orb.bounded_base()) {
        fr.step = torus_mul(orb.zP, 2);
        fr.stride = 2;
        fr.coeff_x = 5.0 / (4.0 * w1 * w1);
        fr.coeff_y = 2.0 * 5.0 * root5 / (8.0 * w1 * w1 * w1);
    } else {
        fr.step = orb.zP;
        fr.stride = 1;
        fr.coeff_x = 5.0 / (w1 * w1);
        fr.coeff_y = 2.0 * 5.0 * root5 / (w1 * w1 * w1);
    }
    return fr;
}

// Verdict shared by the guided scan and the exhaustive cross-check, so the
// two agree exactly whenever they test the same m.
inline bool growth_test(const Orbit& orb, const GrowthFrame& fr, std::uint64_t m, GrowthWitness& w) {
    const TorusCoord tc = torus_mul(fr.step, m);
    const long double dist = tc.t.dist_to_int();
    const RealPoint p = point_from_torus(orb.curve, orb.lattice, tc);

    const long double n = static_cast<long double>(m) * fr.stride;
    w.n = static_cast<std::int64_t>(m) * fr.stride;
    w.x_bound = static_cast<double>(fr.coeff_x * n * n - fr.cx / (n * n));
    w.y_bound = static_cast<double>(fr.coeff_y * n * n * n - fr.cy / n);
    w.saturated = p.at_infinity;
    w.x = p.at_infinity ? infinity_floor_x(orb) : p.x;
    w.y_abs = p.at_infinity ? infinity_floor_y(orb) : std::abs(p.y);
    // paper statement needs y(nP) positive; y is odd in n, so the witness
    // for the signed inequality is n or -n depending on the pole side, and
    // the magnitude is the invariant thing to test
    w.y_ok = w.y_abs > w.y_bound;
    w.hurwitz = dioph_detail::hurwitz_hit(dist, m);
    return w.x > w.x_bound;
}

}  // namespace orbit_detail

// All n <= n_max whose multiple clears the quadratic pole-approach bound,
// found by the convergent-guided candidate scan.  Every Hurwitz witness of
// the step is guaranteed to appear: {m step} < 1/(sqrt(5) m) forces
// x > coeff m^2 stride^2 with room to spare for the slack term.
inline GrowthReport growth_witnesses(const Orbit& orb, std::int64_t n_max) {
    if (n_max < 1 || n_max > kMaxOrbitIndex)
        throw validation_error("growth scan needs 1 <= n_max <= 1e9");

    const orbit_detail::GrowthFrame fr = orbit_detail::growth_frame(orb);
    GrowthReport rep;
    rep.coeff_x = fr.coeff_x;
    rep.coeff_y = fr.coeff_y;
    rep.cx = fr.cx;
    rep.cy = fr.cy;
    rep.stride = fr.stride;

    const auto m_max = static_cast<std::uint64_t>(n_max) / fr.stride;
    for (const std::uint64_t m : orbit_detail::growth_candidates(fr.step.t, m_max)) {
        GrowthWitness w;
        if (orbit_detail::growth_test(orb, fr, m, w)) rep.witnesses.push_back(w);
    }
    return rep;
}

// Exhaustive version of the same verdict, for cross-checking the guided
// scan.  Linear in n_max; keep it at 1e6 or below.
inline std::vector<std::int64_t> growth_witnesses_full_scan(const Orbit& orb, std::int64_t n_max) {
    if (n_max < 1 || n_max > 10'000'000)
        throw validation_error("exhaustive growth scan capped at n_max <= 1e7");

    const orbit_detail::GrowthFrame fr = orbit_detail::growth_frame(orb);
    std::vector<std::int64_t> out;
    const auto m_max = static_cast<std::uint64_t>(n_max) / fr.stride;
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        GrowthWitness w;
        if (orbit_detail::growth_test(orb, fr, m, w)) out.push_back(w.n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Khinchin-rate growth scans

struct KhinchinGrowthHit {
    std::int64_t n = 0;
    double value = 0.0;  // canonical x, or |Y| (floors when saturated)
};

struct KhinchinGrowthReport {
    std::vector<KhinchinGrowthHit> x_hits;  // x(nP) > psi(n)^2
    std::vector<KhinchinGrowthHit> y_hits;  // |Y(nP)| > psi(n)^3, sign chosen via n -> -n
    std::uint64_t scanned = 0;
};

// Full scan n = 1..n_max against a growth rate psi.  The x witnesses are the
// orbit-side face of {n t} psi(n) < 1-style approximation witnesses; both
// inequalities are tested on the actual evaluated coordinates.
inline KhinchinGrowthReport khinchin_growth_scan(const Orbit& orb,
                                                 const std::function<long double(std::uint64_t)>& psi,
                                                 std::int64_t n_max) {
    if (n_max < 1 || n_max > 10'000'000)
        throw validation_error("khinchin growth scan capped at n_max <= 1e7");

    KhinchinGrowthReport rep;
    const double fx = infinity_floor_x(orb);
    const double fy = infinity_floor_y(orb);
    orbit_scan(orb, 1, n_max, [&](const OrbitSample& s) {
        ++rep.scanned;
        const long double pn = psi(static_cast<std::uint64_t>(s.n));
        if (!(pn > 0.0L)) throw validation_error("psi must be positive");
        const long double x = s.at_infinity ? fx : static_cast<long double>(s.x);
        const long double y = s.at_infinity ? fy : fabsl(static_cast<long double>(s.y));
        if (x > pn * pn) rep.x_hits.push_back({s.n, static_cast<double>(x)});
        if (y > pn * pn * pn) rep.y_hits.push_back({s.n, static_cast<double>(y)});
    });
    return rep;
}

// Preset overload.  The exponential rate is compared in log2 space, where
// the carrier's floors translate into honest thresholds instead of
// overflowing 2^(2n).
inline KhinchinGrowthReport khinchin_growth_scan(const Orbit& orb, PsiPreset psi, std::int64_t n_max) {
    if (psi != PsiPreset::exponential) {
        return khinchin_growth_scan(
            orb,
            [psi](std::uint64_t n) -> long double {
                const auto nf = static_cast<long double>(n);
                switch (psi) {
                case PsiPreset::linear: return nf;
                case PsiPreset::nlog2n: {
                    const long double lg = logl(nf + 1.0L);
                    return nf * lg * lg;
                }
                default: return nf * nf;  // quadratic
                }
            },
            n_max);
    }

    if (n_max < 1 || n_max > 10'000'000)
        throw validation_error("khinchin growth scan capped at n_max <= 1e7");
    KhinchinGrowthReport rep;
    const long double lfx = log2l(static_cast<long double>(infinity_floor_x(orb)));
    const long double lfy = log2l(static_cast<long double>(infinity_floor_y(orb)));
    constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
    orbit_scan(orb, 1, n_max, [&](const OrbitSample& s) {
        ++rep.scanned;
        const auto nf = static_cast<long double>(s.n);
        const long double lx = s.at_infinity ? lfx : (s.x > 0.0 ? log2l(static_cast<long double>(s.x)) : kNegInf);
        const long double ly = s.at_infinity ? lfy : (s.y != 0.0 ? log2l(fabsl(static_cast<long double>(s.y))) : kNegInf);
        if (lx > 2.0L * nf) rep.x_hits.push_back({s.n, s.at_infinity ? infinity_floor_x(orb) : s.x});
        if (ly > 3.0L * nf) rep.y_hits.push_back({s.n, s.at_infinity ? infinity_floor_y(orb) : std::abs(s.y)});
    });
    return rep;
}

// ---------------------------------------------------------------------------
// tail proportions

// Proportion of |k| < n_max with canonical x(kP) > X, normalized by 2 n_max
// as in the limit law.  x is even in k, so positive k are counted once and
// doubled; k = 0 has no affine x and is left out.  X must clear the bounded
// lobe entirely, otherwise the closed-form comparison target is meaningless.
inline double tail_proportion(const Orbit& orb, std::int64_t n_max, double X) {
    if (n_max < 2 || n_max > kMaxOrbitIndex)
        throw validation_error("tail proportion needs 2 <= n_max <= 1e9");
    if (orb.curve.two_components && X <= orb.curve.roots[1])
        throw validation_error("x threshold must lie above the bounded lobe");

    std::uint64_t count = 0;
    const double fx = infinity_floor_x(orb);
    orbit_scan(orb, 1, n_max - 1, [&](const OrbitSample& s) {
        const double x = s.at_infinity ? fx : s.x;
        if (x > X) ++count;
    });
    return static_cast<double>(count) / static_cast<double>(n_max);
}

// Proportion of |k| < n_max with canonical Y(kP) > Y.  Y is odd in k, so
// each |k| whose magnitude clears the threshold contributes exactly one of
// +-k to the signed count.
inline double tail_proportion_y(const Orbit& orb, std::int64_t n_max, double Y) {
    if (n_max < 2 || n_max > kMaxOrbitIndex)
        throw validation_error("tail proportion needs 2 <= n_max <= 1e9");
    if (!(Y > 0.0)) throw validation_error("y threshold must be positive");
    if (orb.curve.two_components) {
        // peak of |Y| on the bounded lobe: rhs has its local maximum at
        // -sqrt(g2/12), which always lies inside [e1, e2]
        const double xc = -std::sqrt(orb.curve.g2 / 12.0);
        const double peak = std::sqrt(std::max(0.0, orb.curve.rhs(xc)));
        if (Y <= peak) throw validation_error("y threshold must clear the bounded lobe");
    }

    std::uint64_t count = 0;
    const double fy = infinity_floor_y(orb);
    orbit_scan(orb, 1, n_max - 1, [&](const OrbitSample& s) {
        const double y = s.at_infinity ? fy : std::abs(s.y);
        if (y > Y) ++count;
    });
    return static_cast<double>(count) / (2.0 * static_cast<double>(n_max));
}

// ---------------------------------------------------------------------------
// exponentially fast approximation, carried onto a curve

// Growth certificates along the constructed direction alpha with
// {q_k alpha} < 2^-q_k.  Small indices are evaluated directly on the curve
// and compared against 2^(2 q_k) in floating point.  Once that threshold
// leaves double range the inequality is certified instead: the exact
// convergent data gives s = {q_k alpha} < 2^-q_k, and the pole bound
// x >= (omega1 s)^-2 - C_x s^2 > 2^(2 q_k) closes whenever omega1 < 1.
// The carrier's own multiple saturates the pole guard at that scale, which
// corroborates but cannot replace the exact chain.
struct FastGrowthCertificate {
    std::size_t k = 0;
    bigint q;
    bool bound_certified = false;   // scale psi(q_k) {q_k alpha} < 1 in exact integers
    bool direct = false;            // exceeded was measured in floating point
    double x = 0.0;                 // canonical x(q_k P) when direct
    bool carrier_saturated = false; // stored-grid multiple hit the pole guard
    bool exceeded = false;          // x(q_k P) > 2^(2 q_k) by the applicable route
};

struct FastGrowthDemo {
    ContinuedFraction cf;
    Frac192 alpha;
    double omega1 = 0.0;
    double cx = 0.0;
    std::vector<FastGrowthCertificate> certificates;
};

inline FastGrowthDemo exponential_growth_demo(const Curve& curve, std::size_t depth = 6) {
    FastGrowthDemo demo;
    Lattice lat = compute_periods(curve);
    if (!(lat.omega1 < 1.0))
        throw validation_error("exponential growth demo needs omega1 < 1; rescale the curve "
                               "(g2, g3) -> (s^4 g2, s^6 g3)");
    const TailBounds tails = fit_tail_bounds(lat);

    demo.cf = construct_fast_approximable(PsiPreset::exponential, depth);
    demo.alpha = cf_value(demo.cf);
    demo.omega1 = lat.omega1;
    demo.cx = tails.cx;

    // omega1 with a one-sided safety margin; it enters the certified chain
    // as an upper bound
    const double w1u = lat.omega1 * (1.0 + 1e-9);
    const TorusCoord z{demo.alpha, false};

    // the last stored convergent only verifies its predecessors' bounds
    for (std::size_t k = 0; k + 1 < demo.cf.a.size(); ++k) {
        FastGrowthCertificate cert;
        cert.k = k;
        cert.q = demo.cf.q[k];
        cert.bound_certified = construction_bound_holds(demo.cf, PsiPreset::exponential, k);

        const bool q_small = cert.q <= 100'000'000;
        const auto qu = q_small ? cert.q.convert_to<std::uint64_t>() : 0;
        if (q_small) {
            const RealPoint p = point_from_torus(curve, lat, torus_mul(z, qu));
            cert.carrier_saturated = p.at_infinity;
            if (!p.at_infinity && 2 * qu <= 1000) {
                cert.direct = true;
                cert.x = p.x;
                cert.exceeded = p.x > std::ldexp(1.0, static_cast<int>(2 * qu));
            }
        }
        if (!cert.direct) {
            // exact route: (omega1 s)^-2 - C_x s^2 > 2^(2q) for s < 2^-q
            // reduces to 1/omega1^2 - 1 > C_x 2^(-4q), all safely in doubles
            const double rhs =
                cert.q > 100'000 ? 0.0 : tails.cx * std::exp2(-4.0 * cert.q.convert_to<double>());
            cert.exceeded = cert.bound_certified && (1.0 / (w1u * w1u) - 1.0 > rhs);
        }
        demo.certificates.push_back(std::move(cert));
    }
    return demo;
}

}  // namespace ellorbit
