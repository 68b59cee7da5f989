#pragma once

#include <optional>
#include <vector>

#include "hypermoment/conic.hpp"
#include "hypermoment/linalg.hpp"
#include "hypermoment/measure.hpp"
#include "hypermoment/moment_matrix.hpp"
#include "hypermoment/tolerances.hpp"

namespace hypermoment {

/// Real roots of a univariate polynomial given by coefficients in order of
/// decreasing degree (companion-matrix eigenvalues, Newton-polished, sorted).
/// Complex roots are dropped when the imaginary part exceeds
/// root_imag * max(1, root magnitude). A (near-)zero or constant polynomial
/// has no roots.
std::vector<double> real_roots(const std::vector<double>& coeffs,
                               const Tolerances& tol = {});

/// Common real zero set of the column relations of a moment matrix, intersected
/// with the canonical curve. `finite == false` means the relations do not cut
/// the curve down to finitely many points (points is then empty).
struct Variety {
    std::vector<std::pair<double, double>> points;
    bool finite = true;
};

/// Candidate points come from the curve-restricted relation polynomials; each
/// candidate is kept only if its evaluation vector is (numerically) orthogonal
/// to the kernel of the rescaled matrix AND every relation polynomial vanishes
/// at it relative to its evaluation scale.
Variety compute_variety(const MomentMatrix& M, CanonicalCurve curve,
                        const Tolerances& tol = {});

/// Necessary condition: rank <= number of points available on the curve.
bool variety_condition(int rank, const Variety& V);

/// Read the unique representing measure off a flat extension: the atoms are the
/// extension's variety (whose cardinality must equal the base rank), and the
/// densities solve the full moment system of the base sequence (row-weighted,
/// column-scaled least squares). Throws NoRepresentingMeasure on a cardinality
/// mismatch or a significantly negative density.
AtomicMeasure extract_measure(const MomentSequence& base_beta, const MomentMatrix& base_M,
                              const MomentMatrix& ext_M, CanonicalCurve curve,
                              const Tolerances& tol = {});

}  // namespace hypermoment
