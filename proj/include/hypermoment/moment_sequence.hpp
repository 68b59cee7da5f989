#pragma once

#include <stdexcept>
#include <vector>

#include "hypermoment/monomial.hpp"

namespace hypermoment {

/// Dense truncated bisequence beta_{ij} = integral of y^i x^j, stored for all
/// i + j <= degree in degree-lex order. beta_{00} is the total mass and must be
/// positive for a well-posed problem (enforced by the solver, not the container).
class MomentSequence {
public:
    MomentSequence() = default;
    explicit MomentSequence(int degree)
        : degree_(degree), values_(moment_matrix_size(degree), 0.0) {
        if (degree < 0) throw std::invalid_argument("MomentSequence: negative degree");
    }

    int degree() const { return degree_; }
    bool has(int i, int j) const { return i >= 0 && j >= 0 && i + j <= degree_; }

    double at(int i, int j) const {
        check(i, j);
        return values_[monomial_position(i, j)];
    }
    double& at(int i, int j) {
        check(i, j);
        return values_[monomial_position(i, j)];
    }
    double operator()(Mono m) const { return at(m.i, m.j); }

    /// Restriction to a lower degree.
    MomentSequence truncated(int new_degree) const {
        if (new_degree > degree_)
            throw std::invalid_argument("MomentSequence::truncated: degree grows");
        MomentSequence out(new_degree);
        for (Mono m : monomials_upto(new_degree)) out.at(m.i, m.j) = at(m.i, m.j);
        return out;
    }

    /// The sequence of the coordinate-swapped problem: beta'_{ij} = beta_{ji}.
    MomentSequence swapped_xy() const {
        MomentSequence out(degree_);
        for (Mono m : monomials_upto(degree_)) out.at(m.i, m.j) = at(m.j, m.i);
        return out;
    }

    friend bool operator==(const MomentSequence&, const MomentSequence&) = default;

private:
    void check(int i, int j) const {
        if (!has(i, j)) throw std::out_of_range("MomentSequence: index out of range");
    }

    int degree_ = 0;
    std::vector<double> values_{0.0};
};

/// The linear functional associated with beta applied to a polynomial:
/// p = sum c_{ij} y^i x^j maps to sum c_{ij} beta_{ij}.
inline double riesz(const MomentSequence& beta, const Poly& p) {
    double acc = 0.0;
    for (const auto& [m, c] : p) acc += c * beta.at(m.i, m.j);
    return acc;
}

}  // namespace hypermoment
