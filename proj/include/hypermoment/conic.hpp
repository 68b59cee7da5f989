#pragma once

#include <string>
#include <utility>

#include "hypermoment/measure.hpp"
#include "hypermoment/moment_sequence.hpp"

namespace hypermoment {

/// Real conic q_xx x^2 + q_xy xy + q_yy y^2 + q_x x + q_y y + q_c = 0.
struct Conic {
    double xx = 0.0, xy = 0.0, yy = 0.0, x = 0.0, y = 0.0, c = 0.0;

    double eval(double px, double py) const {
        return xx * px * px + xy * px * py + yy * py * py + x * px + y * py + c;
    }
    /// Largest coefficient magnitude; the relative scale for all thresholds.
    double scale() const;
};

enum class ConicClass {
    nondegenerate_hyperbola,
    degenerate_hyperbola,  ///< two intersecting real lines
    ellipse,
    parabola,
    line,            ///< a single (possibly repeated) real line
    parallel_lines,
    point,
    empty_set,
    other,           ///< no genuine quadratic or linear locus (e.g. constant)
};

std::string to_string(ConicClass c);

/// Classification by the signs of the quadratic-form determinant and the full
/// 3x3 determinant, with thresholds relative to the coefficient scale.
ConicClass classify(const Conic& Q, double rel_tol = 1e-10);

/// Affine map (x, y) -> (a1 + b1 x + c1 y, a2 + b2 x + c2 y).
struct DegreeOneMap {
    double a1 = 0.0, b1 = 1.0, c1 = 0.0;
    double a2 = 0.0, b2 = 0.0, c2 = 1.0;

    std::pair<double, double> operator()(double px, double py) const {
        return {a1 + b1 * px + c1 * py, a2 + b2 * px + c2 * py};
    }
    double det() const { return b1 * c2 - c1 * b2; }
};

/// Inverse map; throws std::domain_error when the linear part is singular.
DegreeOneMap invert(const DegreeOneMap& phi);

/// Composition f after g: (f_compose_g)(p) = f(g(p)).
DegreeOneMap compose(const DegreeOneMap& f, const DegreeOneMap& g);

/// The conic Q composed with the map: (Q_of_map)(p) = Q(phi(p)).
Conic transform_conic(const Conic& Q, const DegreeOneMap& phi);

enum class CanonicalCurve { yx_eq_1, yx_eq_0 };

/// Defining conic of the canonical curve (xy - 1 or xy).
Conic canonical_conic(CanonicalCurve c);

struct HyperbolaNormalization {
    DegreeOneMap phi;           ///< maps the canonical curve ONTO Z(Q)
    CanonicalCurve canonical;   ///< yx_eq_1 for nondegenerate, yx_eq_0 for degenerate
    double lambda = 1.0;        ///< Q(phi(u, v)) = lambda * (canonical polynomial at (u, v))
};

/// Affine normalization of a hyperbola to its canonical model. The returned map
/// has positive linear-part determinant and is verified against sample points
/// of the canonical curve to a 1e-8 relative residual.
/// Throws UnsupportedCurve when Q is not a hyperbola.
HyperbolaNormalization normalize_hyperbola(const Conic& Q);

/// Moments of the pushforward: out_{ij} = riesz(beta, phi_2^i * phi_1^j), the
/// moment sequence of phi(mu) when beta is the moment sequence of mu.
MomentSequence transform_moments(const MomentSequence& beta, const DegreeOneMap& phi);

/// Atoms mapped through phi, densities unchanged.
AtomicMeasure pushforward_measure(const AtomicMeasure& mu, const DegreeOneMap& phi);

}  // namespace hypermoment
