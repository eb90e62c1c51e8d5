#pragma once

#include <stdexcept>
#include <string>

namespace ellorbit {

// Input rejected before any real computation started: malformed curve spec,
// singular curve, off-curve point, torsion starting point, unusable parameter.
// The CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation could not meet its accuracy contract: iteration cap reached,
// quadrature failed to converge, or a requested quantity exceeds the precision
// budget of its inputs. The CLI maps this to exit code 3.
class precision_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ellorbit
