#include "hypermoment/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "hypermoment/errors.hpp"

namespace hypermoment {

PsdReport psd_check(const Eigen::MatrixXd& M, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double lo = ev(0), hi = ev(ev.size() - 1);
    double norm2 = std::max(std::abs(lo), std::abs(hi));
    return {lo >= -tol.psd_eig * std::max(1.0, norm2), lo};
}

RankReport numeric_rank(const Eigen::MatrixXd& M, const Tolerances& tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return {0, 0.0, false};
    double smax = s(0);
    int r = 0;
    while (r < s.size() && s(r) > tol.rank_rel * smax) ++r;
    bool warn = false;
    if (r > 0 && r < s.size() && s(r) > 0.0) warn = s(r - 1) / s(r) < 1e3;
    return {r, smax, warn};
}

ScaledMatrix diagonal_rescale(const Eigen::MatrixXd& M) {
    const int m = static_cast<int>(M.rows());
    Eigen::VectorXd dg = M.diagonal().cwiseMax(0.0).cwiseSqrt();
    double ref = m ? dg.maxCoeff() : 1.0;
    // a diagonal entry at ~1e-14 of the largest is indistinguishable from
    // rounding noise in the moments; rescaling by its square root would blow
    // the noise row up to unit size and fabricate a rank contribution
    Eigen::VectorXd d(m);
    for (int k = 0; k < m; ++k) d(k) = dg(k) > 1e-7 * std::max(1.0, ref) ? dg(k) : 1.0;
    Eigen::MatrixXd Ms = d.cwiseInverse().asDiagonal() * M * d.cwiseInverse().asDiagonal();
    return {Ms, d};
}

RankReport moment_matrix_rank(const MomentMatrix& M, const Tolerances& tol) {
    return numeric_rank(diagonal_rescale(M.A).Ms, tol);
}

LstsqResult lstsq_min_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rcond) {
    if (A.cols() == 0) return {Eigen::VectorXd(0), b.norm()};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rcond);
    Eigen::VectorXd w = svd.solve(b);
    return {w, (A * w - b).norm()};
}

Eigen::MatrixXd lstsq_min_norm_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      double rcond) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rcond);
    return svd.solve(B);
}

ColumnStructure column_relations(const MomentMatrix& M, const Tolerances& tol) {
    auto [Ms, d] = diagonal_rescale(M.A);
    const auto mons = monomials_upto(M.n);
    ColumnStructure out;
    std::vector<int> basis_cols;
    for (int k = 0; k < static_cast<int>(mons.size()); ++k) {
        double cn = Ms.col(k).norm();
        if (basis_cols.empty()) {
            if (cn <= tol.residual)
                out.relations.push_back({mons[k], {}});
            else {
                out.basis.push_back(mons[k]);
                basis_cols.push_back(k);
            }
            continue;
        }
        Eigen::MatrixXd A(Ms.rows(), basis_cols.size());
        for (size_t c = 0; c < basis_cols.size(); ++c) A.col(c) = Ms.col(basis_cols[c]);
        auto [w, res] = lstsq_min_norm(A, Ms.col(k));
        if (res <= tol.residual * std::max(1.0, cn)) {
            Poly combo;
            for (size_t c = 0; c < basis_cols.size(); ++c)
                combo[mons[basis_cols[c]]] = w(c) * d(k) / d(basis_cols[c]);
            out.relations.push_back({mons[k], combo});
        } else {
            out.basis.push_back(mons[k]);
            basis_cols.push_back(k);
        }
    }
    return out;
}

std::vector<Poly> relation_polynomials(const ColumnStructure& cs) {
    std::vector<Poly> out;
    out.reserve(cs.relations.size());
    for (const auto& rel : cs.relations) {
        Poly p{{rel.pivot, 1.0}};
        for (const auto& [m, c] : rel.combo) poly_add_term(p, m, -c);
        out.push_back(poly_trim(p));
    }
    return out;
}

std::vector<Poly> relations_against_basis(const MomentMatrix& M,
                                          const std::vector<Mono>& basis_monos) {
    auto [Ms, d] = diagonal_rescale(M.A);
    Eigen::MatrixXd A(Ms.rows(), basis_monos.size());
    for (size_t c = 0; c < basis_monos.size(); ++c)
        A.col(c) = Ms.col(monomial_position(basis_monos[c]));
    std::vector<Poly> out;
    for (Mono mon : monomials_upto(M.n)) {
        if (std::find(basis_monos.begin(), basis_monos.end(), mon) != basis_monos.end())
            continue;
        int k = monomial_position(mon);
        auto [w, res] = lstsq_min_norm(A, Ms.col(k));
        if (res > 1e-5 * std::max(1.0, Ms.col(k).norm()))
            throw NoRepresentingMeasure("column not spanned by the structural basis");
        Poly p{{mon, 1.0}};
        for (size_t c = 0; c < basis_monos.size(); ++c)
            poly_add_term(p, basis_monos[c], -w(c) * d(k) / d(monomial_position(basis_monos[c])));
        out.push_back(poly_trim(p));
    }
    return out;
}

bool recursive_check(const MomentMatrix& M, const std::vector<Poly>& rels) {
    for (const Poly& poly : rels) {
        if (poly.empty()) continue;
        int dp = poly_degree(poly);
        for (Mono shift : monomials_upto(M.n - dp)) {
            Poly prod;
            for (const auto& [m, c] : poly)
                poly_add_term(prod, Mono{m.i + shift.i, m.j + shift.j}, c);
            Eigen::VectorXd col = column_of_poly(M, prod);
            double sc = 1.0;
            for (const auto& [m, c] : prod)
                sc = std::max(sc, M.A.col(monomial_position(m)).norm() * std::abs(c));
            if (col.norm() > 1e-6 * sc) return false;
        }
    }
    return true;
}

RangeReport in_range(const Eigen::MatrixXd& M, const Eigen::VectorXd& v,
                     const Tolerances& tol) {
    auto [w, res] = lstsq_min_norm(M, v);
    return {res <= tol.residual * std::max(1.0, v.norm()), w, res};
}

FlatExtensionBlocks flat_extension_blocks(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd W = lstsq_min_norm_matrix(A, B, 1e-13);
    double res = (A * W - B).norm();
    if (res > 1e-6 * std::max(1.0, B.norm()))
        throw NoRepresentingMeasure("proposed extension block not in the range of the base");
    Eigen::MatrixXd C = W.transpose() * A * W;
    return {A, B, W, C, res};
}

BorderedInverse bordered_inverse(const Eigen::MatrixXd& A_inv, const Eigen::VectorXd& b,
                                 double c) {
    Eigen::VectorXd Ab = A_inv * b;
    double delta = c - b.dot(Ab);
    if (delta <= 0.0)
        throw std::domain_error("bordered_inverse: nonpositive Schur complement");
    const int m = static_cast<int>(A_inv.rows());
    Eigen::MatrixXd out(m + 1, m + 1);
    out.topLeftCorner(m, m) = A_inv + (Ab * Ab.transpose()) / delta;
    out.topRightCorner(m, 1) = -Ab / delta;
    out.bottomLeftCorner(1, m) = -Ab.transpose() / delta;
    out(m, m) = 1.0 / delta;
    return {delta, out};
}

KernelBasis kernel_basis(const Eigen::MatrixXd& M, const Tolerances& tol) {
    auto [Ms, d] = diagonal_rescale(M);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ms, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    int first_null = 0;
    while (first_null < s.size() && s(first_null) > tol.rank_rel * std::max(smax, 1e-300))
        ++first_null;
    int dim = static_cast<int>(Ms.cols()) - first_null;
    Eigen::MatrixXd K = svd.matrixV().rightCols(dim).transpose();
    return {K, d};
}

}  // namespace hypermoment
