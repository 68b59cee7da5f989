#pragma once

#include <stdexcept>
#include <string>

namespace hypermoment {

/// Raised when a step of the pipeline proves that no representing measure on
/// the curve exists (or that a required structural property fails).
class NoRepresentingMeasure : public std::runtime_error {
public:
    explicit NoRepresentingMeasure(const std::string& why) : std::runtime_error(why) {}
};

/// Raised when the supplied conic is not a hyperbola (nondegenerate or two
/// intersecting lines), the only curve family this solver handles.
class UnsupportedCurve : public std::invalid_argument {
public:
    explicit UnsupportedCurve(const std::string& why) : std::invalid_argument(why) {}
};

}  // namespace hypermoment
