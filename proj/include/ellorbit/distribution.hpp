#pragma once

// Distribution laws for the multiples of a point along a real elliptic
// curve.  The orbit of an infinite-order point equidistributes on its torus
// row(s), and pushing the row measure through the Weierstrass
// parameterization gives closed-form answers for where the multiples land:
// a CDF for the x-coordinate, hit densities for small balls and for
// x-interval regions, and residual counts that measure how fast an actual
// orbit converges to those limits.
//
// Conventions: all coordinates are canonical (X, Y) with Y^2 = 4X^3 - g2 X
// - g3.  "Base component" always means the component carrying the orbit's
// base point; the invariant measure lives on one torus row (length omega1)
// when the base is unbounded and on both rows (length 2 omega1) when it is
// bounded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "ellorbit/curve.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/orbit.hpp"
#include "ellorbit/periods.hpp"
#include "ellorbit/quadrature.hpp"

namespace ellorbit {

namespace distribution_detail {

// One-sided incomplete integrals of dx / sqrt(rhs(x)) over the two allowed
// x-pieces.  Endpoint singularities at the roots are removed by the closed
// u = sqrt(x - e) forms shared with the period cross-checks; the unbounded
// piece switches to a decaying-tail complement beyond a fixed split so
// large x stays well conditioned.

struct PieceIntegrals {
    period_detail::RootGaps gaps;
    double axis_split = 0.0;   // where the unbounded piece hands off to the tail map
    double axis_total = 0.0;   // integral over [e_top, inf)
    double lobe_total = 0.0;   // integral over [e_min, e_mid], 0 when one component
};

inline double rho_at(const Curve& c, double x)
{
    return 1.0 / std::sqrt(c.rhs(x));
}

inline PieceIntegrals piece_integrals(const Curve& c)
{
    PieceIntegrals pi;
    pi.gaps = period_detail::root_gaps(c);
    const double e_top = c.e_max();
    const double spread = c.two_components ? (c.e_max() - c.e_min()) : 1.0;
    pi.axis_split = e_top + std::max(1.0, spread);

    const double head =
        period_detail::rho_axis_head(c, pi.gaps, pi.axis_split, "axis head");
    auto rho = [&](double x) { return rho_at(c, x); };
    const double tail =
        integrate_to_infinity(rho, pi.axis_split, std::max(1.0, spread))
            .checked("axis tail");
    pi.axis_total = head + tail;

    if (c.two_components) {
        const double mid = 0.5 * (c.e_min() + c.e_mid());
        pi.lobe_total =
            period_detail::rho_lobe_left(c, pi.gaps, mid, "lobe left") +
            period_detail::rho_lobe_right(c, pi.gaps, mid, "lobe right");
    }
    return pi;
}

// Integral of rho from e_top to x (x may be +inf), clamped into the piece.
inline double axis_measure_below(const Curve& c, const PieceIntegrals& pi, double x)
{
    const double e_top = c.e_max();
    if (x <= e_top)
        return 0.0;
    if (x <= pi.axis_split)
        return period_detail::rho_axis_head(c, pi.gaps, x, "axis cdf");
    if (std::isinf(x))
        return pi.axis_total;
    auto rho = [&](double t) { return rho_at(c, t); };
    const double above =
        integrate_to_infinity(rho, x, std::max(1.0, x - e_top))
            .checked("axis cdf tail");
    return pi.axis_total - above;
}

// Integral of rho from e_min to x, clamped into the bounded lobe.
inline double lobe_measure_below(const Curve& c, const PieceIntegrals& pi, double x)
{
    const double e1 = c.e_min();
    const double e2 = c.e_mid();
    if (x <= e1)
        return 0.0;
    if (x >= e2)
        return pi.lobe_total;
    const double mid = 0.5 * (e1 + e2);
    if (x <= mid)
        return period_detail::rho_lobe_left(c, pi.gaps, x, "lobe cdf");
    return pi.lobe_total -
           period_detail::rho_lobe_right(c, pi.gaps, x, "lobe cdf right");
}

} // namespace distribution_detail

// The limiting law itself.  `eta` is the component weight for ball
// densities: 1 when the base point and the target both live on the
// unbounded component, 1/2 whenever the base is bounded, 0 when the target
// is bounded but the base is not.  The default rule implements exactly
// that; it is a field so experiments can override it.
struct DensityModel {
    Curve curve;
    Lattice lattice;
    std::function<double(Component base, Component target)> eta;

    // Quadrature values of the two piece integrals.  Each equals omega1 / 2
    // up to quadrature error; the residual of that identity is kept as a
    // health figure and CDF ratios use the quadrature values so the total
    // mass is exactly 1.
    double half_axis_measure = 0.0;
    double lobe_measure = 0.0;
    double axis_split = 0.0;
    double norm_residual = 0.0;
};

inline DensityModel make_density_model(const Curve& curve, const Lattice& lattice)
{
    DensityModel m;
    m.curve = curve;
    m.lattice = lattice;
    m.eta = [](Component base, Component target) {
        if (base == Component::bounded)
            return 0.5;
        return target == Component::bounded ? 0.0 : 1.0;
    };

    const auto pi = distribution_detail::piece_integrals(curve);
    m.half_axis_measure = pi.axis_total;
    m.lobe_measure = pi.lobe_total;
    m.axis_split = pi.axis_split;

    const double half_period = 0.5 * lattice.omega1;
    double res = std::abs(m.half_axis_measure / half_period - 1.0);
    if (curve.two_components)
        res = std::max(res, std::abs(m.lobe_measure / half_period - 1.0));
    m.norm_residual = res;
    if (!(res <= 1e-9))
        throw precision_error(
            "density normalization drifted from the real period");
    return m;
}

namespace distribution_detail {

inline void check_base_component(const DensityModel& m, Component base)
{
    if (base == Component::bounded && !m.curve.two_components)
        throw validation_error(
            "bounded base component requires a two-component curve");
}

inline PieceIntegrals pieces_of(const DensityModel& m)
{
    PieceIntegrals pi;
    pi.gaps = period_detail::root_gaps(m.curve);
    pi.axis_split = m.axis_split;
    pi.axis_total = m.half_axis_measure;
    pi.lobe_total = m.lobe_measure;
    return pi;
}

} // namespace distribution_detail

// CDF of x(nP) under the limiting law.  `clamped` flags an input that fell
// outside the closure of the allowed x-region (below the support, or in the
// gap between the lobe and the unbounded piece); the value returned there is
// the flat continuation of the CDF.
struct CdfValue {
    double value = 0.0;
    bool clamped = false;
};

inline CdfValue theoretical_x_cdf(const DensityModel& m, Component base, double x)
{
    distribution_detail::check_base_component(m, base);
    if (std::isnan(x))
        throw validation_error("cdf evaluation point must be a number");

    const auto pi = distribution_detail::pieces_of(m);
    const Curve& c = m.curve;
    CdfValue out;

    if (base == Component::unbounded) {
        if (x <= c.e_max()) {
            out.clamped = (x < c.e_max());
            return out;
        }
        out.value = std::min(
            1.0, distribution_detail::axis_measure_below(c, pi, x) / pi.axis_total);
        return out;
    }

    // Bounded base: half the mass sits on the lobe, half on the unbounded
    // piece, in x-order lobe first.
    const double denom = pi.lobe_total + pi.axis_total;
    if (x < c.e_min()) {
        out.clamped = true;
        return out;
    }
    if (x <= c.e_mid()) {
        out.value = distribution_detail::lobe_measure_below(c, pi, x) / denom;
        return out;
    }
    if (x < c.e_max()) {
        out.clamped = true;
        out.value = pi.lobe_total / denom;
        return out;
    }
    out.value = std::min(
        1.0, (pi.lobe_total + distribution_detail::axis_measure_below(c, pi, x)) /
                 denom);
    return out;
}

// Density of visits to the eps-ball around p0, to leading order in eps.
// The quadratic term is genuinely unknown at this order, so it is reported
// as a separate bracket (`order_eps2`, the leading value times eps) and
// never folded into `value`.
struct PointDensity {
    double value = 0.0;
    double order_eps2 = 0.0;
};

inline PointDensity point_density(const DensityModel& m, const RealPoint& p0,
                                  Component base, double eps)
{
    distribution_detail::check_base_component(m, base);
    if (p0.at_infinity)
        throw validation_error("density ball must be centred on a finite point");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw validation_error("ball radius must be positive and finite");

    const Curve& c = m.curve;
    const double rhs = c.rhs(p0.x);
    const double scale = std::max({1.0, std::abs(rhs), p0.y * p0.y});
    if (std::abs(p0.y * p0.y - rhs) > 1e-6 * scale)
        throw validation_error("ball centre must lie on the curve");

    // Speed and curvature of z -> (wp, wp') at p0.  The ball is required to
    // be small against the local curvature radius, otherwise the
    // leading-order count is meaningless.
    const double d2 = 6.0 * p0.x * p0.x - 0.5 * c.g2;
    const double speed = std::hypot(p0.y, d2);
    const double cross = std::abs(12.0 * p0.x * p0.y * p0.y - d2 * d2);
    if (cross > 0.0 && eps > 0.1 * speed * speed * speed / cross)
        throw validation_error(
            "ball radius exceeds a tenth of the local curvature radius");

    PointDensity out;
    const double w = m.eta(base, p0.component);
    if (w == 0.0)
        return out;
    out.value = 2.0 * w * eps / (m.lattice.omega1 * speed);
    out.order_eps2 = out.value * eps;
    return out;
}

// Regions eligible for exact density statements: finite unions of
// x-intervals with an optional y-sign constraint, plus eps-balls (which
// contribute their leading-order density).  Other shapes are not supported.
enum class YSign { both, positive, negative };

struct XInterval {
    double lo = 0.0;
    double hi = 0.0;
    YSign sign = YSign::both;
};

struct Ball {
    RealPoint center;
    double eps = 0.0;
};

struct Region {
    std::vector<XInterval> intervals;
    std::vector<Ball> balls;
};

inline Region region_everything()
{
    Region r;
    r.intervals.push_back({-std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity(), YSign::both});
    return r;
}

inline Region region_x_above(double x)
{
    Region r;
    r.intervals.push_back(
        {x, std::numeric_limits<double>::infinity(), YSign::both});
    return r;
}

inline Region region_x_slice(double lo, double hi, YSign sign = YSign::both)
{
    Region r;
    r.intervals.push_back({lo, hi, sign});
    return r;
}

// Natural density of orbit visits to `region`.  Interval pieces are assumed
// disjoint (overlaps count twice).  A one-sided y constraint carries half
// the mass of the corresponding x-slice; the x-density is symmetric in the
// sign of y, so `positive` and `negative` slices of the same interval are
// equal by construction.
inline double region_density(const DensityModel& m, Component base,
                             const Region& region)
{
    distribution_detail::check_base_component(m, base);
    const auto pi = distribution_detail::pieces_of(m);
    const Curve& c = m.curve;
    const double denom = (base == Component::bounded)
                             ? pi.lobe_total + pi.axis_total
                             : pi.axis_total;

    double total = 0.0;
    for (const auto& iv : region.intervals) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi)
            throw validation_error("interval endpoints must be ordered numbers");
        const double w = (iv.sign == YSign::both) ? 1.0 : 0.5;

        double measure =
            distribution_detail::axis_measure_below(c, pi, iv.hi) -
            distribution_detail::axis_measure_below(c, pi, iv.lo);
        if (base == Component::bounded)
            measure += distribution_detail::lobe_measure_below(c, pi, iv.hi) -
                       distribution_detail::lobe_measure_below(c, pi, iv.lo);
        total += w * measure / denom;
    }
    for (const auto& ball : region.balls)
        total += point_density(m, ball.center, base, ball.eps).value;
    return total;
}

// Kolmogorov-style sup distance between the empirical x-distribution of the
// first n_max multiples and the limiting law.  The model CDF is evaluated
// through its torus-side form (the CDF of x at a sample with row distance s
// is 1 - 2s, 1 - s, or s depending on the row and base component), which is
// the same monotone function as theoretical_x_cdf, so the comparison
// reduces to a uniformity test of the transformed samples.  `bins`
// equal-mass cells bound the sup from below with resolution 1/bins.
inline double empirical_vs_theoretical(const Orbit& orb, const DensityModel& m,
                                       std::int64_t n_max, int bins = 2000)
{
    if (orb.curve.g2 != m.curve.g2 || orb.curve.g3 != m.curve.g3)
        throw validation_error("orbit and density model describe different curves");
    if (n_max < 1)
        throw validation_error("empirical comparison needs n_max >= 1");
    if (bins < 8)
        throw validation_error("empirical comparison needs at least 8 bins");

    const bool bounded_base = orb.bounded_base();
    std::vector<std::int64_t> cells(static_cast<std::size_t>(bins), 0);
    orbit_scan(orb, n_max, [&](const OrbitSample& s) {
        const double dist = static_cast<double>(s.dist);
        double u;
        if (s.half_shift)
            u = dist;
        else
            u = bounded_base ? 1.0 - dist : 1.0 - 2.0 * dist;
        auto idx = static_cast<std::int64_t>(u * bins);
        idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
        ++cells[static_cast<std::size_t>(idx)];
    });

    double sup = 0.0;
    std::int64_t cum = 0;
    for (int j = 1; j <= bins; ++j) {
        cum += cells[static_cast<std::size_t>(j - 1)];
        const double gap = std::abs(static_cast<double>(cum) / n_max -
                                    static_cast<double>(j) / bins);
        sup = std::max(sup, gap);
    }
    return sup;
}

// Residuals r(n) = count(n) - rho * n of region visits against the limiting
// density, sampled at the given checkpoints, plus a least-squares exponent
// of |r(n)| in n.  The exponent is NaN when every residual vanishes (as it
// must when the region is everything).
struct DiscrepancySeries {
    double rho = 0.0;
    std::vector<std::int64_t> n;
    std::vector<std::int64_t> count;
    std::vector<double> residual;
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
};

inline DiscrepancySeries discrepancy_residual(const Orbit& orb,
                                              const DensityModel& m,
                                              const Region& region,
                                              const std::vector<std::int64_t>& n_grid)
{
    if (orb.curve.g2 != m.curve.g2 || orb.curve.g3 != m.curve.g3)
        throw validation_error("orbit and density model describe different curves");
    if (n_grid.empty())
        throw validation_error("discrepancy grid must not be empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
            throw validation_error("discrepancy grid must be strictly increasing");
    }
    if (n_grid.back() > 10'000'000)
        throw validation_error("discrepancy scan capped at n <= 1e7");

    const Component base =
        orb.bounded_base() ? Component::bounded : Component::unbounded;
    DiscrepancySeries out;
    out.rho = region_density(m, base, region);
    out.n = n_grid;

    auto hit = [&](const OrbitSample& s) {
        for (const auto& iv : region.intervals) {
            if (s.x < iv.lo || s.x > iv.hi)
                continue;
            if (iv.sign == YSign::positive && !(s.y > 0.0))
                continue;
            if (iv.sign == YSign::negative && !(s.y < 0.0))
                continue;
            return true;
        }
        for (const auto& ball : region.balls) {
            const double dx = s.x - ball.center.x;
            const double dy = s.y - ball.center.y;
            if (dx * dx + dy * dy < ball.eps * ball.eps)
                return true;
        }
        return false;
    };

    std::int64_t hits = 0;
    std::size_t next = 0;
    orbit_scan(orb, n_grid.back(), [&](const OrbitSample& s) {
        if (hit(s))
            ++hits;
        if (next < n_grid.size() && s.n == n_grid[next]) {
            out.count.push_back(hits);
            out.residual.push_back(static_cast<double>(hits) -
                                   out.rho * static_cast<double>(s.n));
            ++next;
        }
    });

    // Least-squares slope of log |r| against log n, over the checkpoints
    // with a nonvanishing residual.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < out.n.size(); ++i) {
        const double r = std::abs(out.residual[i]);
        if (r < 1e-12)
            continue;
        const double lx = std::log(static_cast<double>(out.n[i]));
        const double ly = std::log(r);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++k;
    }
    if (k >= 2) {
        const double var = sxx - sx * sx / k;
        if (var > 0.0)
            out.fitted_exponent = (sxy - sx * sy / k) / var;
    }
    return out;
}

// Histogram with explicit (possibly unequal) bin edges and a mass-based trim
// policy, for empirical densities that need their far tails cut before any
// comparison against a model.
struct EmpiricalDistribution {
    std::vector<double> edges;          // ascending, bins = edges.size() - 1
    std::vector<std::int64_t> counts;   // per bin
    std::int64_t below = 0;
    std::int64_t above = 0;
    double trim_lo = 0.0;               // mass fraction to drop at each end
    double trim_hi = 0.0;

    std::int64_t total() const
    {
        std::int64_t t = below + above;
        for (auto c : counts)
            t += c;
        return t;
    }
};

inline EmpiricalDistribution make_empirical(std::vector<double> edges,
                                            double trim_lo = 0.0,
                                            double trim_hi = 0.0)
{
    if (edges.size() < 2)
        throw validation_error("empirical distribution needs at least one bin");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw validation_error("bin edges must be strictly increasing");
    if (trim_lo < 0.0 || trim_hi < 0.0 || trim_lo + trim_hi >= 1.0)
        throw validation_error("trim fractions must be nonnegative and sum below 1");
    EmpiricalDistribution d;
    d.edges = std::move(edges);
    d.counts.assign(d.edges.size() - 1, 0);
    d.trim_lo = trim_lo;
    d.trim_hi = trim_hi;
    return d;
}

inline void empirical_add(EmpiricalDistribution& d, double x)
{
    if (x < d.edges.front()) {
        ++d.below;
        return;
    }
    if (x >= d.edges.back()) {
        ++d.above;
        return;
    }
    const auto it = std::upper_bound(d.edges.begin(), d.edges.end(), x);
    ++d.counts[static_cast<std::size_t>(it - d.edges.begin()) - 1];
}

// First and last bin (inclusive) that survive the trim: the largest prefix
// and suffix whose mass (including out-of-range counts) stays within the
// trim fractions are dropped.  Throws when the trim leaves nothing.
inline std::pair<std::size_t, std::size_t> trim_window(const EmpiricalDistribution& d)
{
    const auto total = static_cast<double>(d.total());
    if (total == 0.0)
        throw validation_error("cannot trim an empty distribution");
    const auto lo_budget = static_cast<std::int64_t>(d.trim_lo * total);
    const auto hi_budget = static_cast<std::int64_t>(d.trim_hi * total);

    std::size_t first = 0;
    std::int64_t mass = d.below;
    while (first < d.counts.size() && mass + d.counts[first] <= lo_budget)
        mass += d.counts[first++];

    std::size_t last = d.counts.size();
    mass = d.above;
    while (last > first && mass + d.counts[last - 1] <= hi_budget)
        mass += d.counts[--last];

    if (last == first)
        throw validation_error("trim policy removed the whole distribution");
    return {first, last - 1};
}

} // namespace ellorbit
