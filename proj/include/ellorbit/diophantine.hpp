#pragma once

// Rational approximation toolkit: continued fractions with exact big-integer
// convergents, scanners for the classical approximation inequalities, and a
// constructor for numbers approximable faster than any prescribed rate.
//
// The central quantity everywhere is {n*alpha}, the distance from n*alpha to
// the nearest integer. Alpha is carried as a Frac192, so multiples and running
// sums are exact mod 1 and the only error in {n*alpha} is the 2^-192 grid the
// carrier lives on, scaled by n. Witness scans therefore give the same verdict
// on every run and on every machine.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ellorbit/accumulators.hpp"
#include "ellorbit/bigreal.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/frac192.hpp"

namespace ellorbit {

// {n*alpha} for the dyadic value alpha actually stores. Exact multiplication
// mod 1, then the distance is read off the limbs, so the absolute error is at
// most n*2^-192 plus one long double rounding.
inline long double frac_dist(const Frac192& alpha, std::uint64_t n)
{
    if (n == 0)
        throw validation_error("frac_dist: n must be positive");
    return alpha.times(n).dist_to_int();
}

// Big-integer multiplier. The 192 stored bits support a 2^-60 absolute error
// guarantee only while n stays at or below 2^132; larger n is refused rather
// than silently returning noise.
inline long double frac_dist(const Frac192& alpha, const bigint& n)
{
    if (n <= 0)
        throw validation_error("frac_dist: n must be positive");
    if (n > (bigint(1) << 132)) {
        const unsigned bits = boost::multiprecision::msb(n) + 1;
        throw precision_error("frac_dist: n has " + std::to_string(bits) +
                              " bits, needs alpha with at least " + std::to_string(bits + 60) +
                              " fractional bits; 192 available");
    }
    bigint t = (bigint(alpha.w[0]) << 128) | (bigint(alpha.w[1]) << 64) | alpha.w[2];
    t = (n * t) & ((bigint(1) << 192) - 1);
    Frac192 r;
    const bigint mask = (bigint(1) << 64) - 1;
    r.w[2] = static_cast<std::uint64_t>(t & mask);
    r.w[1] = static_cast<std::uint64_t>((t >> 64) & mask);
    r.w[0] = static_cast<std::uint64_t>((t >> 128) & mask);
    return r.dist_to_int();
}

// Exact rational version, for callers that have alpha = p/q exactly.
inline long double frac_dist_exact(const bigrat& alpha, const bigint& n)
{
    if (n <= 0)
        throw validation_error("frac_dist_exact: n must be positive");
    const bigint q = boost::multiprecision::denominator(alpha);
    bigint r = (n * boost::multiprecision::numerator(alpha)) % q;
    if (r < 0)
        r += q;
    if (2 * r > q)
        r = q - r;
    return bigrat(r, q).convert_to<long double>();
}

struct ContinuedFraction {
    std::vector<bigint> a; // partial quotients, a[0] is the integer part
    std::vector<bigint> p; // convergent numerators, p[k]/q[k] after consuming a[k]
    std::vector<bigint> q; // convergent denominators, nondecreasing, strict from k=1 on
    bool terminated = false; // remainder hit zero, the input is exactly the last convergent
    bool truncated = false;  // stopped early, by depth or by a precision or size budget
};

namespace dioph_detail {

inline bigint next_denominator(const ContinuedFraction& cf, const bigint& ak)
{
    const std::size_t k = cf.a.size();
    if (k == 0) return 1;
    if (k == 1) return ak;
    return ak * cf.q[k - 1] + cf.q[k - 2];
}

inline void push_quotient(ContinuedFraction& cf, const bigint& ak)
{
    const std::size_t k = cf.a.size();
    bigint pk, qk;
    if (k == 0) {
        pk = ak;
        qk = 1;
    } else if (k == 1) {
        pk = ak * cf.p[0] + 1;
        qk = ak;
    } else {
        pk = ak * cf.p[k - 1] + cf.p[k - 2];
        qk = ak * cf.q[k - 1] + cf.q[k - 2];
    }
    cf.a.push_back(ak);
    cf.p.push_back(pk);
    cf.q.push_back(qk);
    if (k >= 1) {
        const bigint det = cf.p[k] * cf.q[k - 1] - cf.p[k - 1] * cf.q[k];
        if (det != 1 && det != -1)
            throw std::logic_error("continued fraction: determinant identity failed");
    }
}

} // namespace dioph_detail

// Standard expansion of an exact rational. Always terminates; depth bounds the
// number of partial quotients after the integer part, and hitting it before
// the remainder vanishes just sets the truncated flag.
inline ContinuedFraction continued_fraction(const bigrat& alpha, std::size_t depth)
{
    ContinuedFraction cf;
    bigint num = boost::multiprecision::numerator(alpha);
    bigint den = boost::multiprecision::denominator(alpha);
    for (std::size_t k = 0; k <= depth; ++k) {
        bigint ak = num / den;
        if (num < 0 && ak * den != num)
            --ak; // floor division; only the integer part can be negative
        const bigint rem = num - ak * den;
        dioph_detail::push_quotient(cf, ak);
        if (rem == 0) {
            cf.terminated = true;
            return cf;
        }
        num = den;
        den = rem;
    }
    cf.truncated = true;
    return cf;
}

// Expansion of the dyadic value a Frac192 stores, stopped before any convergent
// whose denominator squared reaches 2^190. Up to that point the digits agree
// with those of any real the carrier rounds from; past it they would describe
// the rounding itself, so the expansion is cut and flagged instead.
inline ContinuedFraction continued_fraction_to_budget(const Frac192& alpha, std::size_t depth = 400)
{
    ContinuedFraction cf;
    bigint num = (bigint(alpha.w[0]) << 128) | (bigint(alpha.w[1]) << 64) | alpha.w[2];
    bigint den = bigint(1) << 192;
    const bigint qq_budget = bigint(1) << 190;
    for (std::size_t k = 0; k <= depth; ++k) {
        const bigint ak = num / den; // operands stay nonnegative, value is in [0,1)
        const bigint rem = num - ak * den;
        const bigint qk = dioph_detail::next_denominator(cf, ak);
        if (qk * qk >= qq_budget) {
            cf.truncated = true;
            return cf;
        }
        dioph_detail::push_quotient(cf, ak);
        if (rem == 0) {
            cf.terminated = true;
            return cf;
        }
        num = den;
        den = rem;
    }
    cf.truncated = true;
    return cf;
}

// As above, but the requested depth is a contract: if the precision budget
// runs out first the caller asked for digits that cannot be certified.
inline ContinuedFraction continued_fraction(const Frac192& alpha, std::size_t depth)
{
    ContinuedFraction cf = continued_fraction_to_budget(alpha, depth);
    if (cf.truncated && !cf.terminated && cf.a.size() < depth + 1)
        throw precision_error("continued_fraction: only " + std::to_string(cf.a.size()) +
                              " partial quotients certifiable at 192-bit precision, " +
                              std::to_string(depth + 1) + " requested");
    return cf;
}

// Fractional part of the deepest convergent, ready for orbit stepping.
inline Frac192 cf_value(const ContinuedFraction& cf)
{
    if (cf.q.empty())
        throw validation_error("cf_value: empty expansion");
    return Frac192::from_rational(cf.p.back(), cf.q.back());
}

namespace dioph_detail {

inline bool hurwitz_hit(long double dist, std::uint64_t n)
{
    static const long double rt5 = sqrtl(5.0L);
    return dist * rt5 * static_cast<long double>(n) < 1.0L;
}

} // namespace dioph_detail

// All n <= N with {n*alpha} < 1/(sqrt(5)*n), by brute force. Quadratic-rate
// approximation forces the reduced nearest fraction to be a convergent, so
// this exists as the oracle for the structured scan below, and for small N
// it is cheap anyway: one exact add and one limb read per step.
inline std::vector<std::uint64_t> hurwitz_full_scan(const Frac192& alpha, std::uint64_t N)
{
    std::vector<std::uint64_t> out;
    Frac192 t = Frac192::zero();
    for (std::uint64_t n = 1; n <= N; ++n) {
        t = t + alpha;
        if (dioph_detail::hurwitz_hit(t.dist_to_int(), n))
            out.push_back(n);
    }
    return out;
}

// Same list via the convergent structure. Any witness n satisfies
// {n*alpha} < 1/(2n), so its reduced nearest fraction is a convergent p_k/q_k
// and n = m*q_k with m*{q_k*alpha} = {n*alpha} < 1/2. Scanning multiples of
// each denominator until m*{q_k*alpha} clears 1/2 (with margin) is therefore
// complete; candidates are re-tested directly so the verdict never relies on
// the multiplier identity.
inline std::vector<std::uint64_t> hurwitz_witnesses(const Frac192& alpha, std::uint64_t N)
{
    const ContinuedFraction cf = continued_fraction_to_budget(alpha);
    std::vector<std::uint64_t> out;
    for (std::size_t k = 0; k < cf.q.size(); ++k) {
        if (cf.q[k] > N)
            break;
        const std::uint64_t qk = cf.q[k].convert_to<std::uint64_t>();
        const long double dk = frac_dist(alpha, qk);
        const std::uint64_t m_cap = N / qk;
        for (std::uint64_t m = 1; m <= m_cap; ++m) {
            if (dk * static_cast<long double>(m) > 0.75L)
                break; // witnesses past this point belong to a later convergent
            const std::uint64_t n = m * qk;
            if (dioph_detail::hurwitz_hit(frac_dist(alpha, n), n))
                out.push_back(n);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Named approximation rates for witness scans and constructions.
enum class PsiPreset { linear, nlog2n, quadratic, exponential };

inline const char* psi_name(PsiPreset psi)
{
    switch (psi) {
    case PsiPreset::linear: return "linear";
    case PsiPreset::nlog2n: return "nlog2n";
    case PsiPreset::quadratic: return "quadratic";
    case PsiPreset::exponential: return "exponential";
    }
    return "?";
}

inline PsiPreset psi_from_name(const std::string& name)
{
    if (name == "linear") return PsiPreset::linear;
    if (name == "nlog2n") return PsiPreset::nlog2n;
    if (name == "quadratic") return PsiPreset::quadratic;
    if (name == "exponential") return PsiPreset::exponential;
    throw validation_error("unknown psi preset '" + name +
                           "' (expected linear, nlog2n, quadratic or exponential)");
}

// All n <= N with {n*alpha} < 1/psi(n) for a preset rate. Full scan: unlike
// the Hurwitz case the threshold may exceed 1/(2n), so witnesses need not sit
// on convergent denominators. The exponential rate compares in log2 because
// 2^-n underflows long before the scan range ends.
inline std::vector<std::uint64_t> khinchin_scan(const Frac192& alpha, PsiPreset psi, std::uint64_t N)
{
    std::vector<std::uint64_t> out;
    Frac192 t = Frac192::zero();
    for (std::uint64_t n = 1; n <= N; ++n) {
        t = t + alpha;
        const long double d = t.dist_to_int();
        const long double nf = static_cast<long double>(n);
        bool hit = false;
        switch (psi) {
        case PsiPreset::linear:
            hit = d * nf < 1.0L;
            break;
        case PsiPreset::nlog2n: {
            const long double lg = logl(nf + 1.0L);
            hit = d * nf * lg * lg < 1.0L;
            break;
        }
        case PsiPreset::quadratic:
            hit = d * nf * nf < 1.0L;
            break;
        case PsiPreset::exponential:
            hit = d == 0.0L || log2l(d) < -nf;
            break;
        }
        if (hit)
            out.push_back(n);
    }
    return out;
}

// General-rate overload; psi(n) must be positive and is trusted as given.
inline std::vector<std::uint64_t> khinchin_scan(const Frac192& alpha,
                                                const std::function<long double(std::uint64_t)>& psi,
                                                std::uint64_t N)
{
    std::vector<std::uint64_t> out;
    Frac192 t = Frac192::zero();
    for (std::uint64_t n = 1; n <= N; ++n) {
        t = t + alpha;
        if (t.dist_to_int() * psi(n) < 1.0L)
            out.push_back(n);
    }
    return out;
}

// Simultaneous version: n <= N with {n*alpha_j} < n^(-1/k) for every j.
inline std::vector<std::uint64_t> dirichlet_simultaneous(const std::vector<Frac192>& alphas,
                                                         std::uint64_t N)
{
    if (alphas.empty())
        throw validation_error("dirichlet_simultaneous: need at least one alpha");
    const long double exponent = -1.0L / static_cast<long double>(alphas.size());
    std::vector<Frac192> acc(alphas.size(), Frac192::zero());
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 1; n <= N; ++n) {
        const long double thr = powl(static_cast<long double>(n), exponent);
        bool all = true;
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            acc[j] = acc[j] + alphas[j];
            if (acc[j].dist_to_int() >= thr)
                all = false;
        }
        if (all)
            out.push_back(n);
    }
    return out;
}

namespace dioph_detail {

// ceil(scale*psi(q)/q) + 1 in exact integer arithmetic, or nothing when the
// value cannot be represented within max_bits. For the nlog2n rate the exact
// quotient is irrational, so a certified overestimate is used instead: the
// bit length of q+1 exceeds ln(q+1), and any quotient at least the exact rule
// keeps the construction's guarantee.
inline std::optional<bigint> psi_quotient(PsiPreset psi, const bigint& q,
                                          const bigint& scale, unsigned max_bits)
{
    switch (psi) {
    case PsiPreset::linear:
        return scale + 1;
    case PsiPreset::nlog2n: {
        const unsigned len = boost::multiprecision::msb(q + 1) + 1;
        return scale * len * len + 1;
    }
    case PsiPreset::quadratic:
        return scale * q + 1;
    case PsiPreset::exponential: {
        if (q > max_bits)
            return std::nullopt;
        const unsigned e = q.convert_to<unsigned>();
        const bigint num = scale << e;
        return (num + q - 1) / q + 1;
    }
    }
    return std::nullopt;
}

// scale * psi(q) evaluated exactly, or a certified overestimate for nlog2n.
// Used by the bound check below; an overestimate can only make the check
// stricter, never falsely pass it.
inline std::optional<bigint> psi_ceiling(PsiPreset psi, const bigint& q,
                                         const bigint& scale, unsigned max_bits)
{
    switch (psi) {
    case PsiPreset::linear:
        return scale * q;
    case PsiPreset::nlog2n: {
        const unsigned len = boost::multiprecision::msb(q + 1) + 1;
        return scale * q * len * len;
    }
    case PsiPreset::quadratic:
        return scale * q * q;
    case PsiPreset::exponential: {
        if (q > max_bits)
            return std::nullopt;
        return scale << q.convert_to<unsigned>();
    }
    }
    return std::nullopt;
}

} // namespace dioph_detail

// Builds alpha in (0,1) with {q_k*alpha} < 1/(scale*psi(q_k)) at every
// constructed index, by choosing each partial quotient at least
// ceil(scale*psi(q_k)/q_k) + 1. The classical gap {q_k*alpha} < 1/q_(k+1)
// then lands under the target. When a quotient or denominator outgrows
// max_bits the prefix built so far is returned with the truncated flag; for
// fast rates that is the normal exit, the next quotient is a number with
// astronomically many digits.
inline ContinuedFraction construct_fast_approximable(PsiPreset psi, std::size_t depth,
                                                     const bigint& scale = 1,
                                                     unsigned max_bits = 1u << 16)
{
    if (scale <= 0)
        throw validation_error("construct_fast_approximable: scale must be positive");
    ContinuedFraction cf;
    dioph_detail::push_quotient(cf, 0);
    for (std::size_t k = 1; k <= depth; ++k) {
        const std::optional<bigint> ak =
            dioph_detail::psi_quotient(psi, cf.q.back(), scale, max_bits);
        if (!ak) {
            cf.truncated = true;
            return cf;
        }
        const bigint qk = dioph_detail::next_denominator(cf, *ak);
        if (boost::multiprecision::msb(qk) + 1 > max_bits) {
            cf.truncated = true;
            return cf;
        }
        dioph_detail::push_quotient(cf, *ak);
    }
    return cf;
}

// Exact verification that convergent k of a constructed expansion satisfies
// {q_k*alpha} < 1/(scale*psi(q_k)), with the deepest convergent standing in
// for alpha. For k below the last index, that multiple sits within 1/q_(k+1)
// of the integer p_k, so its distance is |q_k*p_L - p_k*q_L| / q_L exactly
// and the inequality reduces to a big-integer comparison.
inline bool construction_bound_holds(const ContinuedFraction& cf, PsiPreset psi, std::size_t k,
                                     const bigint& scale = 1, unsigned max_bits = 1u << 16)
{
    const std::size_t last = cf.q.size() - 1;
    if (cf.q.size() < 2 || k >= last)
        throw validation_error("construction_bound_holds: k must lie below the last convergent");
    const bigint dist_num = abs(cf.q[k] * cf.p[last] - cf.p[k] * cf.q[last]);
    const std::optional<bigint> target = dioph_detail::psi_ceiling(psi, cf.q[k], scale, max_bits);
    if (!target)
        throw precision_error("construction_bound_holds: psi(q_k) exceeds the size budget");
    return *target * dist_num < cf.q[last];
}

struct WeylAverage {
    std::complex<double> average{0.0, 0.0};
    double magnitude = 0.0;
    // 2 / (N * |1 - exp(2*pi*i*ell*alpha)|), the exact geometric-sum bound on
    // the magnitude; infinite when ell*alpha is an integer at the stored
    // precision and the sum degenerates to N equal terms.
    double geometric_bound = 0.0;
    std::uint64_t terms = 0;
};

// Average of exp(2*pi*i*ell*n*alpha) over n = 1..N. Phases are accumulated
// exactly mod 1, trig is evaluated per step and compensated, so the result is
// the true average of the dyadic orbit to long double accuracy.
inline WeylAverage weyl_sum(const Frac192& alpha, std::int64_t ell, std::uint64_t N)
{
    if (ell == 0)
        throw validation_error("weyl_sum: ell must be nonzero");
    if (N == 0)
        throw validation_error("weyl_sum: N must be positive");
    const std::uint64_t mag = ell < 0 ? 0ULL - static_cast<std::uint64_t>(ell)
                                      : static_cast<std::uint64_t>(ell);
    Frac192 theta = alpha.times(mag);
    if (ell < 0)
        theta = theta.negated();

    constexpr long double two_pi = 6.283185307179586476925286766559005768L;
    KahanSum re, im;
    Frac192 ph = Frac192::zero();
    for (std::uint64_t n = 1; n <= N; ++n) {
        ph = ph + theta;
        const long double ang = two_pi * ph.to_long_double();
        re.add(cosl(ang));
        im.add(sinl(ang));
    }

    WeylAverage w;
    w.terms = N;
    const long double nf = static_cast<long double>(N);
    w.average = {static_cast<double>(re.value() / nf), static_cast<double>(im.value() / nf)};
    w.magnitude = std::abs(w.average);
    const long double d = theta.dist_to_int();
    w.geometric_bound = d == 0.0L
                            ? std::numeric_limits<double>::infinity()
                            : static_cast<double>(1.0L / (nf * sinl(0.5L * two_pi * d)));
    return w;
}

} // namespace ellorbit
