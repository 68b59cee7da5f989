#pragma once

#include <stdexcept>

namespace hypermoment {

/// Numerical thresholds used throughout the pipeline. All values are relative
/// tolerances; see the individual operations for the exact scale each one is
/// measured against.
struct Tolerances {
    double psd_eig = 1e-9;    ///< eigenvalue slack for positive semidefiniteness
    double rank_rel = 1e-8;   ///< singular-value cutoff relative to the largest
    double residual = 1e-7;   ///< column-relation / range-membership residual
    double root_imag = 1e-7;  ///< imaginary-part cutoff for accepted real roots
    double dedupe = 1e-7;     ///< distance below which two atoms are merged

    void validate() const {
        if (psd_eig <= 0 || rank_rel <= 0 || residual <= 0 || root_imag <= 0 || dedupe <= 0)
            throw std::invalid_argument("Tolerances: all thresholds must be positive");
    }
};

}  // namespace hypermoment
