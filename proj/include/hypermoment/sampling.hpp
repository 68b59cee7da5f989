#pragma once

#include <cstdint>

#include "hypermoment/conic.hpp"
#include "hypermoment/measure.hpp"
#include "hypermoment/moment_sequence.hpp"

namespace hypermoment {

/// Deterministic sampler for well-conditioned test problems: atoms on the
/// curve with separated coordinates and densities bounded away from zero.
struct SampleSpec {
    CanonicalCurve curve = CanonicalCurve::yx_eq_1;
    int degree = 4;      ///< moment truncation degree 2n
    int atom_count = 3;  ///< on yx = 0 at most 2n + 1 (n per branch + origin)
    std::uint64_t seed = 0;

    double coord_min = 0.35;   ///< atoms stay away from the coordinate axes
    double coord_max = 2.5;
    double separation = 0.12;  ///< guaranteed distance between same-branch coordinates
    double density_min = 0.25;
    double density_max = 1.5;
};

/// Atoms on the canonical curve according to the spec.
AtomicMeasure sample_canonical_measure(const SampleSpec& spec);

struct SampledProblem {
    AtomicMeasure measure;
    MomentSequence beta;  ///< moments of the measure up to spec.degree
};

/// A canonical-curve problem instance: measure plus its truncated moments.
SampledProblem sample_problem(const SampleSpec& spec);

/// A problem on a general hyperbola: the canonical sample is pushed through
/// the normalization map of Q (spec.curve is ignored; it follows Q's class).
SampledProblem sample_problem(const SampleSpec& spec, const Conic& Q);

}  // namespace hypermoment
