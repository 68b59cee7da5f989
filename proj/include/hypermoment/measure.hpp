#pragma once

#include <vector>

#include "hypermoment/moment_sequence.hpp"
#include "hypermoment/tolerances.hpp"

namespace hypermoment {

struct Atom {
    double x = 0.0;
    double y = 0.0;
    double density = 0.0;
};

/// Finitely atomic positive measure sum density_k * delta_{(x_k, y_k)}.
struct AtomicMeasure {
    std::vector<Atom> atoms;

    int size() const { return static_cast<int>(atoms.size()); }
    double mass() const;
};

/// Moments of the measure up to the given total degree.
MomentSequence moments_of(const AtomicMeasure& mu, int degree);

/// Sort atoms by (x, y) for stable comparison and serialization.
void sort_atoms(AtomicMeasure& mu);

struct MeasureCheck {
    bool ok = false;
    double max_residual = 0.0;  ///< max over i,j of |moment - beta| / max(1, |beta|)
};

/// Compare the measure's moments against beta (all degrees beta carries).
MeasureCheck verify_measure(const AtomicMeasure& mu, const MomentSequence& beta,
                            const Tolerances& tol = {});

}  // namespace hypermoment
