#pragma once

// 192-bit fixed-point fraction in [0, 1): value = (w0*2^128 + w1*2^64 + w2) / 2^192.
// Addition and multiplication by a machine integer are exact mod 1, which is
// what makes long orbit scans reproducible: stepping n -> n+1 by adding the
// base fraction accumulates no rounding error at all, and n*t computed in one
// multiply equals the n-fold sum bit for bit.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "ellorbit/bigreal.hpp"
#include "ellorbit/errors.hpp"

namespace ellorbit {

struct Frac192 {
    // w[0] holds the most significant limb.
    std::array<std::uint64_t, 3> w{0, 0, 0};

    static Frac192 zero() { return {}; }

    static Frac192 from_bigreal(bigreal x)
    {
        // Reduce to [0,1). Inputs are O(1) in practice (torus coordinates,
        // fractional parts), so the loop form is fine.
        x -= floor(x);
        Frac192 r;
        const bigreal two64 = bigreal(18446744073709551616.0); // 2^64
        for (int i = 0; i < 3; ++i) {
            x *= two64;
            bigreal limb = floor(x);
            r.w[i] = static_cast<std::uint64_t>(limb);
            x -= limb;
        }
        return r;
    }

    static Frac192 from_double(double x)
    {
        return from_bigreal(bigreal(x));
    }

    // floor(p/q * 2^192) mod 1 for exact rational input; q > 0.
    static Frac192 from_rational(const bigint& p, const bigint& q)
    {
        if (q <= 0)
            throw validation_error("Frac192::from_rational: denominator must be positive");
        bigint pp = p % q;
        if (pp < 0)
            pp += q;
        bigint scaled = (pp << 192) / q;
        Frac192 r;
        const bigint mask = (bigint(1) << 64) - 1;
        r.w[2] = static_cast<std::uint64_t>(scaled & mask);
        r.w[1] = static_cast<std::uint64_t>((scaled >> 64) & mask);
        r.w[0] = static_cast<std::uint64_t>((scaled >> 128) & mask);
        return r;
    }

    static Frac192 from_rational(const bigrat& r)
    {
        return from_rational(boost::multiprecision::numerator(r),
                             boost::multiprecision::denominator(r));
    }

    bool is_zero() const { return w[0] == 0 && w[1] == 0 && w[2] == 0; }

    // (a + b) mod 1
    friend Frac192 operator+(const Frac192& a, const Frac192& b)
    {
        Frac192 r;
        unsigned __int128 acc = static_cast<unsigned __int128>(a.w[2]) + b.w[2];
        r.w[2] = static_cast<std::uint64_t>(acc);
        acc = (acc >> 64) + a.w[1] + b.w[1];
        r.w[1] = static_cast<std::uint64_t>(acc);
        acc = (acc >> 64) + a.w[0] + b.w[0];
        r.w[0] = static_cast<std::uint64_t>(acc); // integer carry drops out
        return r;
    }

    // (1 - a) mod 1, i.e. the additive inverse.
    Frac192 negated() const
    {
        if (is_zero())
            return *this;
        Frac192 r;
        r.w[2] = ~w[2] + 1;
        unsigned borrow2 = (r.w[2] == 0) ? 1u : 0u;
        r.w[1] = ~w[1] + borrow2;
        unsigned borrow1 = (borrow2 && r.w[1] == 0) ? 1u : 0u;
        r.w[0] = ~w[0] + borrow1;
        return r;
    }

    friend Frac192 operator-(const Frac192& a, const Frac192& b)
    {
        return a + b.negated();
    }

    // (n * a) mod 1, exact.
    Frac192 times(std::uint64_t n) const
    {
        Frac192 r;
        unsigned __int128 acc = static_cast<unsigned __int128>(w[2]) * n;
        r.w[2] = static_cast<std::uint64_t>(acc);
        acc = (acc >> 64) + static_cast<unsigned __int128>(w[1]) * n;
        r.w[1] = static_cast<std::uint64_t>(acc);
        acc = (acc >> 64) + static_cast<unsigned __int128>(w[0]) * n;
        r.w[0] = static_cast<std::uint64_t>(acc);
        return r;
    }

    double to_double() const
    {
        return static_cast<double>(w[0]) * 0x1p-64 +
               static_cast<double>(w[1]) * 0x1p-128 +
               static_cast<double>(w[2]) * 0x1p-192;
    }

    long double to_long_double() const
    {
        return static_cast<long double>(w[0]) * 0x1p-64L +
               static_cast<long double>(w[1]) * 0x1p-128L +
               static_cast<long double>(w[2]) * 0x1p-192L;
    }

    bigreal to_bigreal() const
    {
        const bigreal two64 = bigreal(18446744073709551616.0);
        return ((bigreal(w[2]) / two64 + bigreal(w[1])) / two64 + bigreal(w[0])) / two64;
    }

    // Distance to the nearest integer, min(v, 1-v). The smaller of the two is
    // converted after exact limb arithmetic, so tiny distances keep full
    // relative accuracy (a value 2^-190 away from 1 comes out as 2^-190, not 0).
    long double dist_to_int() const
    {
        if (w[0] >> 63)
            return negated().to_long_double();
        return to_long_double();
    }

    // Signed distance to the nearest integer in (-1/2, 1/2]: positive below
    // one half, negative above. Same exact complement trick as dist_to_int.
    long double signed_dist_to_int() const
    {
        if (w[0] >> 63)
            return -negated().to_long_double();
        return to_long_double();
    }

    bool operator==(const Frac192&) const = default;

    friend bool operator<(const Frac192& a, const Frac192& b)
    {
        if (a.w[0] != b.w[0]) return a.w[0] < b.w[0];
        if (a.w[1] != b.w[1]) return a.w[1] < b.w[1];
        return a.w[2] < b.w[2];
    }
};

} // namespace ellorbit
