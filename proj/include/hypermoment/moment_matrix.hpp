#pragma once

#include <Eigen/Dense>

#include "hypermoment/moment_sequence.hpp"
#include "hypermoment/monomial.hpp"

namespace hypermoment {

/// Level-n moment matrix: rows and columns indexed by monomials of degree <= n
/// in degree-lex order, entry (row y^k x^l, col y^i x^j) = beta_{i+k, j+l}.
struct MomentMatrix {
    int n = 0;
    Eigen::MatrixXd A;

    int size() const { return static_cast<int>(A.rows()); }
};

/// Build the level-n moment matrix; requires beta.degree() >= 2n.
MomentMatrix build_moment_matrix(const MomentSequence& beta, int n);

/// The (i+1) x (j+1) block whose rows carry degree-i monomials and columns
/// degree-j monomials; entry (r, c) = beta_{r+c, (i-r)+(j-c)}.
Eigen::MatrixXd moment_block(const MomentSequence& beta, int i, int j);

/// The column vector sum_{terms} c * col(y^i x^j) of M.
Eigen::VectorXd column_of_poly(const MomentMatrix& M, const Poly& p);

}  // namespace hypermoment
