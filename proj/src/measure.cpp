#include "hypermoment/measure.hpp"

#include <algorithm>
#include <cmath>

namespace hypermoment {

double AtomicMeasure::mass() const {
    double m = 0.0;
    for (const Atom& a : atoms) m += a.density;
    return m;
}

MomentSequence moments_of(const AtomicMeasure& mu, int degree) {
    MomentSequence beta(degree);
    for (Mono m : monomials_upto(degree)) {
        double acc = 0.0;
        for (const Atom& a : mu.atoms)
            acc += a.density * std::pow(a.y, m.i) * std::pow(a.x, m.j);
        beta.at(m.i, m.j) = acc;
    }
    return beta;
}

void sort_atoms(AtomicMeasure& mu) {
    std::sort(mu.atoms.begin(), mu.atoms.end(), [](const Atom& a, const Atom& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.density < b.density;
    });
}

MeasureCheck verify_measure(const AtomicMeasure& mu, const MomentSequence& beta,
                            const Tolerances& tol) {
    MomentSequence got = moments_of(mu, beta.degree());
    double worst = 0.0;
    for (Mono m : monomials_upto(beta.degree())) {
        double want = beta.at(m.i, m.j);
        double err = std::abs(got.at(m.i, m.j) - want) / std::max(1.0, std::abs(want));
        worst = std::max(worst, err);
    }
    return {worst <= tol.residual, worst};
}

}  // namespace hypermoment
