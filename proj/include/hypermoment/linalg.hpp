#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hypermoment/moment_matrix.hpp"
#include "hypermoment/tolerances.hpp"

namespace hypermoment {

struct PsdReport {
    bool is_psd = false;
    double min_eigenvalue = 0.0;
};

/// Symmetric PSD test: passes when the smallest eigenvalue is no smaller than
/// -psd_eig * max(1, ||M||_2).
PsdReport psd_check(const Eigen::MatrixXd& M, const Tolerances& tol = {});

struct RankReport {
    int rank = 0;
    double sigma_max = 0.0;
    /// Set when the singular values around the cutoff are separated by less
    /// than three orders of magnitude, i.e. the rank decision is fragile.
    bool gap_warning = false;
};

/// Numerical rank: number of singular values above rank_rel * sigma_max.
RankReport numeric_rank(const Eigen::MatrixXd& M, const Tolerances& tol = {});

struct ScaledMatrix {
    Eigen::MatrixXd Ms;  ///< D^-1 M D^-1
    Eigen::VectorXd d;   ///< D = diag(d); entries with negligible diagonal keep d = 1
};

/// Diagonal rescaling to (approximately) unit diagonal. All rank / relation /
/// dependence decisions run on the rescaled matrix so that columns of wildly
/// different magnitude are compared fairly.
ScaledMatrix diagonal_rescale(const Eigen::MatrixXd& M);

/// Rank of the moment matrix measured on its diagonal rescaling.
RankReport moment_matrix_rank(const MomentMatrix& M, const Tolerances& tol = {});

struct LstsqResult {
    Eigen::VectorXd w;
    double residual = 0.0;  ///< ||A w - b||_2
};

/// Minimum-norm least squares via SVD with relative cutoff rcond.
LstsqResult lstsq_min_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           double rcond = 1e-12);
Eigen::MatrixXd lstsq_min_norm_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      double rcond = 1e-12);

/// One dependent column of the moment matrix: col(pivot) = sum over basis
/// monomials of combo[m] * col(m).
struct ColumnRelation {
    Mono pivot;
    Poly combo;
};

struct ColumnStructure {
    std::vector<Mono> basis;
    std::vector<ColumnRelation> relations;
};

/// Greedy degree-lex scan of the columns: each column is either appended to the
/// basis or recorded as a combination of the basis columns found so far.
/// Detection runs on the diagonal rescaling; combinations are mapped back to
/// the original column scaling.
ColumnStructure column_relations(const MomentMatrix& M, const Tolerances& tol = {});

/// The relations as polynomials pivot - combo, trimmed of noise coefficients.
std::vector<Poly> relation_polynomials(const ColumnStructure& cs);

/// Column relations computed against a FIXED structural basis; throws
/// NoRepresentingMeasure when some column is not spanned by it. Used to check
/// that an extension stays flat over the base matrix's basis.
std::vector<Poly> relations_against_basis(const MomentMatrix& M,
                                          const std::vector<Mono>& basis_monos);

/// Recursive generation: every relation polynomial, multiplied by any monomial
/// that keeps the product inside degree n, must still vanish as a column
/// combination of M.
bool recursive_check(const MomentMatrix& M, const std::vector<Poly>& rels);

struct RangeReport {
    bool in_range = false;
    Eigen::VectorXd w;
    double residual = 0.0;
};

/// Range membership: v is in Ran(M) when ||M w - v|| <= residual * max(1, ||v||).
RangeReport in_range(const Eigen::MatrixXd& M, const Eigen::VectorXd& v,
                     const Tolerances& tol = {});

struct FlatExtensionBlocks {
    Eigen::MatrixXd A, B, W, C;  ///< C = W^T A W with A W ~= B
    double range_residual = 0.0;
};

/// Solve A W = B in the least-squares sense and form the flat completion
/// C = W^T A W. Throws NoRepresentingMeasure when B is not in the range of A
/// (relative residual above 1e-6).
FlatExtensionBlocks flat_extension_blocks(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct BorderedInverse {
    double delta = 0.0;      ///< Schur complement c - b^T A^-1 b
    Eigen::MatrixXd inverse;  ///< inverse of [[A, b], [b^T, c]]
};

/// Inverse of a symmetric one-row/one-column bordering of an already inverted
/// block. Throws std::domain_error when the Schur complement is not positive.
BorderedInverse bordered_inverse(const Eigen::MatrixXd& A_inv, const Eigen::VectorXd& b,
                                 double c);

struct KernelBasis {
    Eigen::MatrixXd K;   ///< rows form an orthonormal basis of ker of the rescaled matrix
    Eigen::VectorXd d;   ///< the rescaling diagonal
};

/// Kernel of the diagonal rescaling of M. A column-relation polynomial has
/// coefficient vector u = u_s / d for any kernel row u_s.
KernelBasis kernel_basis(const Eigen::MatrixXd& M, const Tolerances& tol = {});

}  // namespace hypermoment
