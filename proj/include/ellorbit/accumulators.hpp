#pragma once

// Compensated summation. Long scans add millions of O(1) terms; plain
// accumulation loses low bits linearly in the count, Kahan keeps the error
// at a few ulps of the running total regardless of length.

#include <cstdint>

namespace ellorbit {

inline void kahan_add(long double& sum, long double& comp, long double x)
{
    const long double y = x - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}

struct KahanSum {
    long double sum = 0.0L;
    long double comp = 0.0L;
    std::uint64_t count = 0;

    void add(long double x)
    {
        kahan_add(sum, comp, x);
        ++count;
    }

    long double value() const { return sum; }
    long double mean() const { return count ? sum / count : 0.0L; }
};

} // namespace ellorbit
