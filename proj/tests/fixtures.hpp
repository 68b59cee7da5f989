#pragma once

#include <vector>

#include "hypermoment/moment_sequence.hpp"

// Moment sequences assembled from their pure-power moments. On yx = 1 every
// mixed moment reduces along the curve, beta_{ij} = beta_{i-m, j-m} with
// m = min(i, j); on yx = 0 every mixed moment vanishes.
namespace fixtures {

inline hypermoment::MomentSequence beta_on_unit_hyperbola(const std::vector<double>& xm,
                                                          const std::vector<double>& ym) {
    const int deg = static_cast<int>(xm.size()) - 1;
    hypermoment::MomentSequence b(deg);
    for (hypermoment::Mono m : hypermoment::monomials_upto(deg)) {
        const int red = m.i < m.j ? m.i : m.j;
        const int ii = m.i - red, jj = m.j - red;
        b.at(m.i, m.j) = ii > 0 ? ym[ii] : xm[jj];
    }
    return b;
}

inline hypermoment::MomentSequence beta_on_cross(const std::vector<double>& xm,
                                                 const std::vector<double>& ym) {
    const int deg = static_cast<int>(xm.size()) - 1;
    hypermoment::MomentSequence b(deg);
    for (hypermoment::Mono m : hypermoment::monomials_upto(deg)) {
        if (m.i > 0 && m.j > 0)
            b.at(m.i, m.j) = 0.0;
        else
            b.at(m.i, m.j) = m.i > 0 ? ym[m.i] : xm[m.j];
    }
    return b;
}

/// n = 2 on yx = 1; rank 4, first S dependence at Y^2. The unique measure has
/// four atoms at x = +-sqrt(2 +- sqrt(3)) with equal densities 1/4.
inline hypermoment::MomentSequence rank4_top_y_fixture() {
    return beta_on_unit_hyperbola({1, 0, 2, 0, 7}, {1, 0, 2, 0, 7});
}

/// n = 3 on yx = 1; rank 5 and M(2) already carries the full rank, so the flat
/// closure is determined. Five atoms whose x coordinates solve
/// 21 x^5 - 12 x^4 - 98 x^3 + 42 x^2 + 28 x - 9 = 0.
inline hypermoment::MomentSequence flat_quintic_fixture() {
    return beta_on_unit_hyperbola({1, 0, 2, 0, 8, 1, 740.0 / 21.0},
                                  {1, 0, 2, 0, 8, 49.0 / 9.0, 4180.0 / 81.0});
}

/// n = 3 on yx = 1; rank 7 = 2n + 1 (S is a basis). The one-step flatness
/// obstruction is solvable; distinguished solutions (p, q) = (-2, 151) (flat,
/// 7 atoms) and (-3, 150) (rank grows once, 8 atoms).
inline hypermoment::MomentSequence full_rank_cubic_fixture() {
    return beta_on_unit_hyperbola({1, 0, 1, 0, 3, 0, 14}, {1, 0, 2, 0, 5, 3, 33});
}

/// n = 2 on yx = 0; first S dependence at X^2 with a pure-X relation and no
/// constant term. Four atoms: one on the x-axis, three on the y-axis.
inline hypermoment::MomentSequence cross_line_fixture() {
    return beta_on_cross({1, 1, 2, 4, 8}, {1, 0, 1, 1, 4});
}

/// n = 2 on yx = 0; rank 5 = 2n + 1. The recovered flatness obstruction is the
/// constant 1, so no five-atom measure exists; minimal measures have six atoms.
inline hypermoment::MomentSequence cross_full_rank_fixture() {
    return beta_on_cross({1, 1, 2, 4, 9}, {1, 1, 3, 9, 28});
}

}  // namespace fixtures
