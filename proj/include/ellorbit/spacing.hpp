#pragma once

// Spacing statistics of the sequence x(nP + Q) - x(nP).  The chord law
// makes the spacing at torus position z a deterministic function of x(z)
// and the branch sign of y(z), so the limiting distribution of spacings is
// the pushforward of the row measure through
//
//     F_{s,Q}(x) = ((s sqrt(x^3 + a x + b) - y_Q) / (x - x_Q))^2 - 2x - x_Q
//
// on the short-form curve y^2 = x^3 + a x + b.  The density of spacings at
// a value d sums rho(x)/|F'(x)| over the real solutions of F = d on both
// branches, skipping bounded-lobe abscissas when the orbit base cannot
// reach them.  Moments of the spacings are tracked as running partial sums.
//
// Short-form coordinates relate to the canonical frame by x = X and
// y = Y / 2, so x-spacings agree with canonical X-spacings exactly and
// y-spacings are canonical ones halved.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ellorbit/accumulators.hpp"
#include "ellorbit/curve.hpp"
#include "ellorbit/distribution.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/orbit.hpp"
#include "ellorbit/quadrature.hpp"

namespace ellorbit {

enum class Branch { plus, minus };

struct SpacingProblem {
    double a = 0.0, b = 0.0;    // y^2 = x^3 + a x + b
    double xq = 0.0, yq = 0.0;  // the fixed offset point Q
    std::vector<double> roots;  // real roots of the cubic, ascending
    bool two_components = false;

    double rhs(double x) const { return (x * x + a) * x + b; }
};

inline SpacingProblem make_spacing_problem(const Curve& curve, const RealPoint& q)
{
    if (q.at_infinity)
        throw validation_error("spacing offset point must be finite");
    SpacingProblem pr;
    pr.a = -0.25 * curve.g2;
    pr.b = -0.25 * curve.g3;
    pr.xq = q.x;          // short x equals canonical X
    pr.yq = 0.5 * q.y;    // short y is half the canonical Y
    pr.roots = curve.roots;
    pr.two_components = curve.two_components;

    const double r = pr.rhs(pr.xq);
    const double scale = std::max({1.0, std::abs(r), pr.yq * pr.yq});
    if (std::abs(pr.yq * pr.yq - r) > 1e-9 * scale)
        throw validation_error("spacing offset point must lie on the curve");
    return pr;
}

inline SpacingProblem make_spacing_problem(double a, double b, double xq, double yq)
{
    const Curve c = make_short_curve(bigrat(a), bigrat(b));
    return make_spacing_problem(c, make_point(c, xq, yq));
}

namespace spacing_detail {

inline int sign_of(Branch br) { return br == Branch::plus ? +1 : -1; }

// F without domain checks; rhs clamped at zero so boundary evaluations stay
// defined.  Not valid at x == xq.
inline double F_raw(const SpacingProblem& pr, int s, double x)
{
    const double r = std::max(0.0, pr.rhs(x));
    const double u = s * std::sqrt(r) - pr.yq;
    const double t = u / (x - pr.xq);
    return t * t - 2.0 * x - pr.xq;
}

// sqrt(r) * F'(x).  F' blows up like r^(-1/2) at the cubic roots while the
// density terms need 1/(sqrt(r) |F'|), so this scaled derivative is the
// quantity that stays smooth across the domain boundary.
inline double sqrtr_F_prime(const SpacingProblem& pr, int s, double x)
{
    const double r = std::max(0.0, pr.rhs(x));
    const double sr = std::sqrt(r);
    const double u = s * sr - pr.yq;
    const double dx = x - pr.xq;
    const double rp = 3.0 * x * x + pr.a;
    return s * u * rp / (dx * dx) - 2.0 * u * u * sr / (dx * dx * dx) - 2.0 * sr;
}

// F on the branch matching sign(y_Q) extends continuously through x_Q with
// the tangent-line value; everything else defers to the raw formula.
inline double F_extended(const SpacingProblem& pr, int s, double x)
{
    const double tol = 1e-9 * (1.0 + std::abs(pr.xq));
    if (std::abs(x - pr.xq) > tol || pr.yq == 0.0 || s * pr.yq < 0.0)
        return F_raw(pr, s, x);
    const double lam = (3.0 * pr.xq * pr.xq + pr.a) / (2.0 * pr.yq);
    return lam * lam - 3.0 * pr.xq;
}

// Real eigenvalues of the companion matrix of a monic polynomial given by
// its lower coefficients c[0..n-1] (so p(x) = x^n + c[n-1] x^(n-1) + ...).
inline std::vector<double> monic_real_roots(const std::vector<double>& c)
{
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i)
        m(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
        m(i, n - 1) = -c[static_cast<std::size_t>(i)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);

    std::vector<double> out;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ev = es.eigenvalues()(i);
        if (std::abs(ev.imag()) <= 1e-5 * (1.0 + std::abs(ev.real())))
            out.push_back(ev.real());
    }
    return out;
}

// x-ranges where the curve is real, clipped below by the cubic roots.  The
// unbounded piece is returned with an infinite upper end; callers clip.
inline std::vector<std::pair<double, double>> domain_pieces(const SpacingProblem& pr)
{
    const double inf = std::numeric_limits<double>::infinity();
    if (pr.two_components)
        return {{pr.roots[0], pr.roots[1]}, {pr.roots[2], inf}};
    return {{pr.roots[0], inf}};
}

// Converge a seed toward a solution of F_s = d inside [lo, hi].  Expanding
// bracket plus bisection; seeds that never produce a sign change (tangency)
// are returned as-is and judged by the caller's plug-back test.
inline double refine_root(const SpacingProblem& pr, int s, double d,
                          double seed, double lo, double hi)
{
    seed = std::clamp(seed, lo, hi);
    auto h = [&](double x) { return F_extended(pr, s, x) - d; };

    const double reach = 10.0 * (1.0 + std::abs(seed)) + std::abs(d);
    double a = seed, b = seed;
    double ha = h(a), hb = h(b);
    for (double w = 1e-14 * (1.0 + std::abs(seed)); w < reach; w *= 4.0) {
        const double na = std::max(lo, seed - w);
        const double nb = std::min(hi, seed + w);
        const double hna = h(na), hnb = h(nb);
        if (hna == 0.0) return na;
        if (hnb == 0.0) return nb;
        if (std::signbit(hna) != std::signbit(ha)) {  // crossing in [na, a]
            b = a; hb = ha; a = na; ha = hna;
            break;
        }
        if (std::signbit(hnb) != std::signbit(hb)) {  // crossing in [b, nb]
            a = b; ha = hb; b = nb; hb = hnb;
            break;
        }
        a = na; ha = hna;
        b = nb; hb = hnb;
        if (na == lo && nb == hi) break;
    }
    if (std::signbit(ha) == std::signbit(hb))
        return seed;  // no crossing found; tangency or spurious seed

    for (int it = 0; it < 200 && a < b; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double hm = h(mid);
        if (hm == 0.0) return mid;
        if (std::signbit(hm) == std::signbit(ha)) {
            a = mid; ha = hm;
        } else {
            b = mid; hb = hm;
        }
    }
    return std::abs(ha) <= std::abs(hb) ? a : b;
}

} // namespace spacing_detail

// The spacing transfer function itself.  Domain: on-curve x away from the
// pole at the offset abscissa.
inline double F_eval(const SpacingProblem& pr, Branch branch, double x)
{
    if (!std::isfinite(x))
        throw validation_error("F evaluation point must be finite");
    if (pr.rhs(x) < 0.0)
        throw validation_error("F evaluation point lies off the real locus");
    if (x == pr.xq)
        throw validation_error("F has a pole at the offset abscissa");
    return spacing_detail::F_raw(pr, spacing_detail::sign_of(branch), x);
}

// Closed-form derivative of F; infinite at the cubic roots where the branch
// turns around.
inline double F_prime(const SpacingProblem& pr, Branch branch, double x)
{
    const int s = spacing_detail::sign_of(branch);
    const double r = pr.rhs(x);
    if (r <= 0.0)
        return std::numeric_limits<double>::infinity();
    return spacing_detail::sqrtr_F_prime(pr, s, x) / std::sqrt(r);
}

struct SpacingSolutions {
    std::vector<double> plus;
    std::vector<double> minus;
};

// All real on-curve solutions of F_s(x) = d for both branches.  Clearing
// the radical gives the monic degree-6 polynomial
//     (r(x) + y_Q^2 - (x - x_Q)^2 (2x + x_Q + d))^2 - 4 y_Q^2 r(x),
// whose real roots (companion matrix) seed bisection on the un-squared
// equation; candidates survive only if they plug back to |F - d| <= 1e-8.
// The spurious factor at x_Q is kept only when the tangent-limit value of F
// actually equals d.  With y_Q = 0 both branches coincide and the radical
// clears to a cubic instead.
inline SpacingSolutions solve_F_eq_d(const SpacingProblem& pr, double d)
{
    if (!std::isfinite(d))
        throw validation_error("spacing value d must be finite");

    // G(x) = r(x) + y_Q^2 - (x - x_Q)^2 (2x + x_Q + d), cubic with leading
    // coefficient -1
    const double g2c = 3.0 * pr.xq - d;
    const double g1c = pr.a + 2.0 * pr.xq * d;
    const double g0c = pr.b + pr.yq * pr.yq -
                       pr.xq * pr.xq * (pr.xq + d);

    std::vector<double> seeds;
    if (pr.yq == 0.0) {
        // -G is monic: x^3 - g2c x^2 - g1c x - g0c
        seeds = spacing_detail::monic_real_roots({-g0c, -g1c, -g2c});
    } else {
        // G^2 - 4 y_Q^2 r, monic of degree 6
        const double y2 = 4.0 * pr.yq * pr.yq;
        std::vector<double> p(6);
        p[5] = 2.0 * -1.0 * g2c;
        p[4] = 2.0 * -1.0 * g1c + g2c * g2c;
        p[3] = 2.0 * -1.0 * g0c + 2.0 * g2c * g1c - y2;
        p[2] = 2.0 * g2c * g0c + g1c * g1c;
        p[1] = 2.0 * g1c * g0c - y2 * pr.a;
        p[0] = g0c * g0c - y2 * pr.b;
        seeds = spacing_detail::monic_real_roots(p);
    }
    // boundary and offset abscissas are legitimate solutions the squared
    // polynomial can blur, so they always join the seed list
    for (double e : pr.roots)
        seeds.push_back(e);
    seeds.push_back(pr.xq);

    const double plug_tol = 1e-8 * std::max(1.0, std::abs(d));
    SpacingSolutions out;
    for (int s : {+1, -1}) {
        std::vector<double>& dst = (s > 0) ? out.plus : out.minus;
        for (double seed : seeds) {
            for (const auto& piece : spacing_detail::domain_pieces(pr)) {
                if (seed < piece.first - 1e-9 * (1.0 + std::abs(piece.first)) ||
                    seed > piece.second)
                    continue;
                const double x = spacing_detail::refine_root(
                    pr, s, d, seed, piece.first, piece.second);
                if (std::abs(spacing_detail::F_extended(pr, s, x) - d) <= plug_tol)
                    dst.push_back(x);
            }
        }
        std::sort(dst.begin(), dst.end());
        dst.erase(std::unique(dst.begin(), dst.end(),
                              [](double u, double v) {
                                  return std::abs(u - v) <=
                                         1e-9 * (1.0 + std::abs(u));
                              }),
                  dst.end());
    }
    return out;
}

// Density of the spacing distribution at d: sum of rho(x)/|F'(x)| over the
// solutions, with bounded-lobe abscissas omitted when the orbit base lives
// on the unbounded component (it never visits them).  Solutions sitting at
// a critical point of F make the change of variables degenerate; their
// contribution is still added but the result carries an unreliable flag.
struct SpacingDensity {
    double value = 0.0;
    bool unreliable = false;
};

inline SpacingDensity spacing_density(const SpacingProblem& pr, Component base,
                                      double d)
{
    const SpacingSolutions sol = solve_F_eq_d(pr, d);
    SpacingDensity out;

    auto add = [&](int s, double x) {
        if (base == Component::unbounded && pr.two_components &&
            x <= pr.roots[1] + 1e-12 * (1.0 + std::abs(pr.roots[1])))
            return;  // star rule

        double term, fp;
        if (std::abs(x - pr.xq) <= 1e-9 * (1.0 + std::abs(pr.xq)) &&
            s * pr.yq > 0.0) {
            // tangent-limit solution at the offset point: derivative by a
            // difference quotient on the extended branch, one-sided if the
            // other side leaves the real locus
            const double h = 1e-6 * (1.0 + std::abs(pr.xq));
            double xm = pr.xq - h, xp = pr.xq + h;
            if (pr.rhs(xm) < 0.0) xm = pr.xq;
            if (pr.rhs(xp) < 0.0) xp = pr.xq;
            fp = (spacing_detail::F_extended(pr, s, xp) -
                  spacing_detail::F_extended(pr, s, xm)) /
                 (xp - xm);
            term = 1.0 / (std::abs(pr.yq) * std::abs(fp));
        } else {
            const double r = std::max(0.0, pr.rhs(x));
            const double srf = spacing_detail::sqrtr_F_prime(pr, s, x);
            term = 1.0 / std::abs(srf);
            fp = r > 0.0 ? srf / std::sqrt(r)
                         : std::numeric_limits<double>::infinity();
        }
        if (!(std::abs(fp) >= 1e-8) || !std::isfinite(term))
            out.unreliable = true;
        if (std::isfinite(term))
            out.value += term;
    };

    for (double x : sol.plus) add(+1, x);
    for (double x : sol.minus) add(-1, x);
    return out;
}

// ---------------------------------------------------------------------------
// empirical side

// One spacing sample: the coordinate differences between nP + Q and nP.
// When either endpoint sits inside the pole guard the certified infinity
// floors stand in and the sample is marked saturated.
struct SpacingSample {
    std::int64_t n = 0;
    double dx = 0.0;
    double dy = 0.0;   // short-form y difference (canonical difference halved)
    bool saturated = false;
};

template <typename Visitor>
inline void spacing_scan(const Orbit& orb, const RealPoint& q,
                         std::int64_t first, std::int64_t last, Visitor&& visit)
{
    if (first < 1 || last < first)
        throw validation_error("spacing scan range must satisfy 1 <= first <= last");
    if (last > 10'000'000)
        throw validation_error("spacing scan capped at n <= 1e7");

    const TorusCoord zq = elliptic_log(orb.curve, orb.lattice, q);
    const double fx = infinity_floor_x(orb);
    const double fy = infinity_floor_y(orb);

    TorusCoord ta = torus_mul_signed(orb.zP, first);
    TorusCoord tb = torus_add(ta, zq);
    for (std::int64_t n = first; n <= last; ++n) {
        const RealPoint pa = point_from_torus(orb.curve, orb.lattice, ta);
        const RealPoint pb = point_from_torus(orb.curve, orb.lattice, tb);

        SpacingSample s;
        s.n = n;
        s.saturated = pa.at_infinity || pb.at_infinity;
        const double xa = pa.at_infinity ? fx : pa.x;
        const double xb = pb.at_infinity ? fx : pb.x;
        const double ya = pa.at_infinity ? fy : pa.y;
        const double yb = pb.at_infinity ? fy : pb.y;
        s.dx = xb - xa;
        s.dy = 0.5 * (yb - ya);
        visit(s);

        ta = torus_add(ta, orb.zP);
        tb = torus_add(tb, orb.zP);
    }
}

// Histogram of x-spacings over n = 1..n_max with mass-based trimming: the
// bin range spans the (trim, 1-trim) quantiles of the data and the tails
// land in the below/above counters, so trim_window reproduces the central
// mass exactly.
inline EmpiricalDistribution empirical_spacing(const Orbit& orb, const RealPoint& q,
                                               std::int64_t n_max,
                                               double trim = 0.1, int bins = 200)
{
    if (n_max < 2 || n_max > 10'000'000)
        throw validation_error("empirical spacing needs n_max in 2..1e7");
    if (!(trim >= 0.0) || trim >= 0.5)
        throw validation_error("trim fraction must lie in [0, 0.5)");
    if (bins < 8)
        throw validation_error("empirical spacing needs at least 8 bins");

    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(n_max));
    spacing_scan(orb, q, 1, n_max,
                 [&](const SpacingSample& s) { vals.push_back(s.dx); });

    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    double lo = sorted[static_cast<std::size_t>(trim * static_cast<double>(n))];
    double hi = sorted[n - 1 - static_cast<std::size_t>(trim * static_cast<double>(n))];
    if (!(hi > lo)) {
        const double pad = 1e-9 * (1.0 + std::abs(lo));
        lo -= pad;
        hi += pad;
    }

    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int j = 0; j <= bins; ++j)
        edges[static_cast<std::size_t>(j)] =
            lo + (hi - lo) * static_cast<double>(j) / bins;
    EmpiricalDistribution dist = make_empirical(std::move(edges), trim, trim);
    for (double v : vals)
        empirical_add(dist, v);
    return dist;
}

// d-values where the solution structure of F = d changes: critical values
// of F (a solution pair appears or merges there and f carries an integrable
// one-over-sqrt spike) plus the values at the domain edges and at the
// offset abscissa (finite jumps).  Quadrature of f over an interval must
// split at these points; the adaptive rule mistakes spike-then-zero
// integrands for converged ones when they sit inside one cell.
inline std::vector<double> spacing_break_values(const SpacingProblem& pr,
                                                double dlo, double dhi)
{
    if (!(dlo < dhi) || !std::isfinite(dlo) || !std::isfinite(dhi))
        throw validation_error("break scan needs a finite ordered d-interval");

    std::vector<double> breaks;
    auto push = [&](double d) {
        if (std::isfinite(d) && d > dlo && d < dhi)
            breaks.push_back(d);
    };

    const double pole_guard = 1e-9 * (1.0 + std::abs(pr.xq));
    const double cap = pr.roots.back() + 50.0 +
                       3.0 * std::max({std::abs(dlo), std::abs(dhi), 1.0});
    for (int s : {+1, -1}) {
        for (const auto& piece : spacing_detail::domain_pieces(pr)) {
            const double lo = piece.first;
            const double hi = std::min(piece.second, cap);
            if (s > 0) {
                // family endpoints at the vertical tangents; F agrees on
                // both branches there
                push(spacing_detail::F_raw(pr, s, lo));
                if (std::isfinite(piece.second))
                    push(spacing_detail::F_raw(pr, s, hi));
            }

            const int nodes = 4096;
            auto clear_of_pole = [&](double x) {
                if (std::abs(x - pr.xq) < pole_guard)
                    x += 2.0 * pole_guard;
                return x;
            };
            double xp = clear_of_pole(lo);
            double sp = spacing_detail::sqrtr_F_prime(pr, s, xp);
            for (int i = 1; i <= nodes; ++i) {
                const double x =
                    clear_of_pole(lo + (hi - lo) * static_cast<double>(i) / nodes);
                const double sv = spacing_detail::sqrtr_F_prime(pr, s, x);
                if (std::isfinite(sp) && std::isfinite(sv) &&
                    std::signbit(sp) != std::signbit(sv)) {
                    double a = xp, b = x, ha = sp;
                    for (int it = 0; it < 100 && a < b; ++it) {
                        const double mid = 0.5 * (a + b);
                        if (mid == a || mid == b) break;
                        const double hm = spacing_detail::sqrtr_F_prime(pr, s, mid);
                        if (std::signbit(hm) == std::signbit(ha)) {
                            a = mid; ha = hm;
                        } else {
                            b = mid;
                        }
                    }
                    push(spacing_detail::F_extended(pr, s, 0.5 * (a + b)));
                }
                xp = x;
                sp = sv;
            }
        }
    }
    if (pr.yq != 0.0) {
        const double lam = (3.0 * pr.xq * pr.xq + pr.a) / (2.0 * pr.yq);
        push(lam * lam - 3.0 * pr.xq);
    }

    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double u, double v) {
                                 return std::abs(u - v) <= 1e-10 * (1.0 + std::abs(u));
                             }),
                 breaks.end());
    return breaks;
}

// Mass of the spacing law on [lo, hi], split at the structural break values
// and with each endpoint nudged off the (integrable) spikes.
struct SpacingMass {
    double value = 0.0;
    bool unreliable = false;
};

inline SpacingMass spacing_model_mass(const SpacingProblem& pr, Component base,
                                      double lo, double hi,
                                      const std::vector<double>& breaks)
{
    SpacingMass out;
    auto f = [&](double d) {
        const SpacingDensity v = spacing_density(pr, base, d);
        if (v.unreliable)
            out.unreliable = true;
        return v.value;
    };

    double a = lo;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), lo);
    while (a < hi) {
        const double b = (it != breaks.end() && *it < hi) ? *it++ : hi;
        const double pad = 1e-11 * (1.0 + std::max(std::abs(a), std::abs(b)));
        if (b - a > 4.0 * pad)
            out.value += integrate(f, a + pad, b - pad, 1e-6, 1e-12, 24).value;
        a = b;
    }
    return out;
}

// ---------------------------------------------------------------------------
// model-versus-data comparison

// Bin-averaged densities of the empirical histogram and of f(d) over the
// trimmed window, both normalized to unit mass there.  sup_rel is the sup
// gap measured against the model's tallest bin.
struct SpacingFit {
    std::vector<double> edges;
    std::vector<double> empirical;
    std::vector<double> model;
    double sup_abs = 0.0;
    double scale = 0.0;
    double sup_rel = 0.0;
    bool model_unreliable = false;
};

inline SpacingFit spacing_fit(const SpacingProblem& pr, Component base,
                              const EmpiricalDistribution& hist)
{
    const auto [first, last] = trim_window(hist);
    SpacingFit fit;

    std::int64_t kept = 0;
    for (std::size_t j = first; j <= last; ++j)
        kept += hist.counts[j];
    if (kept <= 0)
        throw validation_error("trimmed histogram holds no samples");

    const std::vector<double> breaks =
        spacing_break_values(pr, hist.edges[first], hist.edges[last + 1]);

    std::vector<double> mass;
    double model_total = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
        const SpacingMass m =
            spacing_model_mass(pr, base, hist.edges[j], hist.edges[j + 1], breaks);
        if (m.unreliable)
            fit.model_unreliable = true;
        mass.push_back(m.value);
        model_total += m.value;
    }
    if (!(model_total > 0.0))
        throw precision_error("spacing model carries no mass on the trimmed window");

    fit.edges.assign(hist.edges.begin() + static_cast<std::ptrdiff_t>(first),
                     hist.edges.begin() + static_cast<std::ptrdiff_t>(last) + 2);
    for (std::size_t j = first; j <= last; ++j) {
        const double w = hist.edges[j + 1] - hist.edges[j];
        const double emp =
            static_cast<double>(hist.counts[j]) / (static_cast<double>(kept) * w);
        const double mod = mass[j - first] / (model_total * w);
        fit.empirical.push_back(emp);
        fit.model.push_back(mod);
        fit.sup_abs = std::max(fit.sup_abs, std::abs(emp - mod));
        fit.scale = std::max(fit.scale, mod);
    }
    fit.sup_rel = fit.sup_abs / fit.scale;
    return fit;
}

// ---------------------------------------------------------------------------
// spacing moments

// S_r(n) = sum_{k<=n} (x(kP+Q) - x(kP))^r at the requested checkpoints,
// with the y analogue alongside.  Sums accumulate in extended precision;
// `overflowed` marks checkpoints whose magnitude no longer fits a double,
// in which case only the log-magnitude columns remain meaningful.
struct MomentPartialSums {
    int r = 1;
    std::vector<std::int64_t> n;
    std::vector<long double> sx;
    std::vector<long double> sy;
    std::vector<double> log_abs_sx;  // log |S| (clamped at 0 for S == 0)
    std::vector<double> log_abs_sy;
    std::uint64_t saturated = 0;
    bool overflowed = false;
};

inline MomentPartialSums moment_partial_sums(const Orbit& orb, const RealPoint& q,
                                             int r,
                                             std::vector<std::int64_t> checkpoints)
{
    if (r < 1 || r > 4)
        throw validation_error("moment order r must be in 1..4");
    if (checkpoints.empty())
        throw validation_error("moment series needs at least one checkpoint");
    std::sort(checkpoints.begin(), checkpoints.end());
    if (checkpoints.front() < 1 || checkpoints.back() > 10'000'000)
        throw validation_error("moment checkpoints must lie in 1..1e7");

    MomentPartialSums out;
    out.r = r;
    out.n = checkpoints;

    KahanSum sx, sy;
    std::size_t next = 0;
    spacing_scan(orb, q, 1, checkpoints.back(), [&](const SpacingSample& s) {
        if (s.saturated)
            ++out.saturated;
        long double px = s.dx, py = s.dy;
        for (int i = 1; i < r; ++i) {
            px *= s.dx;
            py *= s.dy;
        }
        sx.add(px);
        sy.add(py);
        while (next < out.n.size() && s.n == out.n[next]) {
            out.sx.push_back(sx.value());
            out.sy.push_back(sy.value());
            for (const long double v : {sx.value(), sy.value()}) {
                if (fabsl(v) > static_cast<long double>(std::numeric_limits<double>::max()))
                    out.overflowed = true;
            }
            out.log_abs_sx.push_back(
                sx.value() == 0.0L ? 0.0 : static_cast<double>(logl(fabsl(sx.value()))));
            out.log_abs_sy.push_back(
                sy.value() == 0.0L ? 0.0 : static_cast<double>(logl(fabsl(sy.value()))));
            ++next;
        }
    });
    return out;
}

// Least-squares slope of log|S| against log n over the checkpoints, the
// quantity the moment growth statements bound.
inline double moment_log_slope(const MomentPartialSums& ms, bool y_side = false)
{
    const std::vector<long double>& s = y_side ? ms.sy : ms.sx;
    double sn = 0, sl = 0, snn = 0, snl = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const long double mag = fabsl(s[i]);
        if (mag <= 0.0L)
            continue;
        const double ln = std::log(static_cast<double>(ms.n[i]));
        const double lv = static_cast<double>(logl(mag));
        sn += ln;
        sl += lv;
        snn += ln * ln;
        snl += ln * lv;
        ++cnt;
    }
    if (cnt < 2)
        throw validation_error("moment slope needs at least two nonzero checkpoints");
    return (cnt * snl - sn * sl) / (cnt * snn - sn * sn);
}

} // namespace ellorbit
