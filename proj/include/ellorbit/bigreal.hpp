#pragma once

// Extended-precision scalar types. Period and elliptic-log arithmetic runs on
// bigreal (~60 decimal digits, ~200 bits); exact curve arithmetic and
// continued-fraction convergents run on bigint/bigrat.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/math/constants/constants.hpp>

namespace ellorbit {

using bigreal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<60>, boost::multiprecision::et_off>;
using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

inline const bigreal& big_pi()
{
    static const bigreal value = boost::math::constants::pi<bigreal>();
    return value;
}

inline bigreal to_bigreal(const bigrat& r)
{
    return bigreal(boost::multiprecision::numerator(r)) /
           bigreal(boost::multiprecision::denominator(r));
}

} // namespace ellorbit
