#include "hypermoment/moment_matrix.hpp"

#include <stdexcept>

namespace hypermoment {

MomentMatrix build_moment_matrix(const MomentSequence& beta, int n) {
    if (beta.degree() < 2 * n)
        throw std::invalid_argument("build_moment_matrix: sequence degree below 2n");
    const auto mons = monomials_upto(n);
    const int m = static_cast<int>(mons.size());
    MomentMatrix M{n, Eigen::MatrixXd(m, m)};
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            M.A(r, c) = beta.at(mons[r].i + mons[c].i, mons[r].j + mons[c].j);
    return M;
}

Eigen::MatrixXd moment_block(const MomentSequence& beta, int i, int j) {
    if (beta.degree() < i + j)
        throw std::invalid_argument("moment_block: sequence degree below i+j");
    Eigen::MatrixXd B(i + 1, j + 1);
    for (int r = 0; r <= i; ++r)
        for (int c = 0; c <= j; ++c) B(r, c) = beta.at(r + c, (i - r) + (j - c));
    return B;
}

Eigen::VectorXd column_of_poly(const MomentMatrix& M, const Poly& p) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(M.size());
    for (const auto& [m, c] : p) v += c * M.A.col(monomial_position(m));
    return v;
}

}  // namespace hypermoment
