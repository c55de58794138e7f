#pragma once

#include <stdexcept>
#include <string>

namespace nrs {

/// Raised when a computation leaves the representable range, e.g. a capacity
/// prefix sum that overflows to infinity at small tau.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nrs
