#pragma once

// Adaptive Gauss-Kronrod 7/15 quadrature plus the change-of-variable helpers
// used throughout: x = e +- u^2 at a square-root endpoint singularity and a
// scaled rational map for semi-infinite tails. Node values are the standard
// QUADPACK constants.

#include <cmath>
#include <cstdint>
#include <utility>

#include "ellorbit/errors.hpp"

namespace ellorbit {

struct quad_result {
    double value = 0.0;
    double abs_error = 0.0;   // accumulated local error estimates
    int evaluations = 0;
    bool converged = true;

    double checked(const char* what) const
    {
        if (!converged)
            throw precision_error(std::string(what) + ": quadrature did not converge");
        return value;
    }
};

namespace qk_detail {

// Kronrod abscissae on [0,1] half-interval (x7 is the midpoint) and weights;
// Gauss weights attach to every second Kronrod node.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
inline void gk15(F& f, double a, double b, double& kronrod, double& err)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double dx = h * xgk[j];
        const double fsum = (j == 7) ? f(c) : f(c - dx) + f(c + dx);
        resk += wgk[j] * fsum;
        if (j & 1)
            resg += wg[j / 2] * fsum;
    }
    kronrod = resk * h;
    // QUADPACK-style sharpened estimate of the Gauss/Kronrod discrepancy.
    const double diff = std::abs((resk - resg) * h);
    err = diff;
    if (diff > 0.0 && kronrod != 0.0) {
        const double scaled = std::pow(200.0 * diff / std::abs(kronrod), 1.5) * std::abs(kronrod);
        if (scaled < diff)
            err = scaled;
    }
}

template <typename F>
struct adaptive_state {
    F& f;
    double rel_tol;
    double abs_tol;
    int max_depth;
    quad_result out;

    void run(double a, double b, double tol_here, int depth)
    {
        double v, e;
        gk15(f, a, b, v, e);
        out.evaluations += 15;
        if (e <= tol_here || e <= std::abs(v) * rel_tol * 0.5) {
            out.value += v;
            out.abs_error += e;
            return;
        }
        if (depth >= max_depth) {
            out.value += v;
            out.abs_error += e;
            out.converged = false;
            return;
        }
        const double m = 0.5 * (a + b);
        run(a, m, 0.5 * tol_here, depth + 1);
        run(m, b, 0.5 * tol_here, depth + 1);
    }
};

} // namespace qk_detail

// Integrate f over the finite interval [a, b]. The integrand may be singular
// at the endpoints as long as the singularity is integrable (Kronrod nodes
// stay strictly interior), but a removing substitution converges much faster.
template <typename F>
quad_result integrate(F&& f, double a, double b,
                      double rel_tol = 1e-12, double abs_tol = 1e-14,
                      int max_depth = 40)
{
    quad_result empty;
    if (a == b)
        return empty;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    qk_detail::adaptive_state<F> st{f, rel_tol, abs_tol, max_depth, {}};
    // First pass to set the absolute scale for the local tolerance budget.
    double v0, e0;
    qk_detail::gk15(f, a, b, v0, e0);
    st.out.evaluations = 15;
    const double tol0 = std::max(abs_tol, std::abs(v0) * rel_tol);
    if (e0 <= tol0) {
        st.out.value = v0;
        st.out.abs_error = e0;
    } else {
        const double m = 0.5 * (a + b);
        st.run(a, m, 0.5 * tol0, 1);
        st.run(m, b, 0.5 * tol0, 1);
    }
    st.out.value *= sign;
    return st.out;
}

// Integrate f over [e, b] when f behaves like c/sqrt(x - e) near x = e.
// Substituting x = e + u^2 turns the integrand into 2u f(e + u^2), which is
// smooth at u = 0.
template <typename F>
quad_result integrate_sqrt_left(F&& f, double e, double b,
                                double rel_tol = 1e-12, double abs_tol = 1e-14)
{
    const double w = b - e;
    if (w <= 0.0)
        return {};
    const double umax = std::sqrt(w);
    return integrate([&](double u) { return 2.0 * u * f(e + u * u); },
                     0.0, umax, rel_tol, abs_tol);
}

// Mirror image: integrate f over [a, e] when f ~ c/sqrt(e - x) near x = e.
template <typename F>
quad_result integrate_sqrt_right(F&& f, double a, double e,
                                 double rel_tol = 1e-12, double abs_tol = 1e-14)
{
    const double w = e - a;
    if (w <= 0.0)
        return {};
    const double umax = std::sqrt(w);
    return integrate([&](double u) { return 2.0 * u * f(e - u * u); },
                     0.0, umax, rel_tol, abs_tol);
}

// Integrate f over [a, +inf) for integrands decaying at least like x^(-3/2).
// The map x = a + scale*(1/v^2 - 1) sends v in (0,1] onto [a,inf) and makes a
// x^(-3/2) tail analytic at v = 0. `scale` should match the natural size of
// the transition region (e.g. the spread of the cubic's roots).
template <typename F>
quad_result integrate_to_infinity(F&& f, double a, double scale,
                                  double rel_tol = 1e-12, double abs_tol = 1e-14)
{
    const double s = (scale > 0.0) ? scale : 1.0;
    return integrate(
        [&, s](double v) {
            const double inv = 1.0 / (v * v);
            const double x = a + s * (inv - 1.0);
            return f(x) * 2.0 * s * inv / v;
        },
        0.0, 1.0, rel_tol, abs_tol);
}

} // namespace ellorbit
