#include "hypermoment/solver.hpp"

#include <algorithm>
#include <cmath>

namespace hypermoment {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::no_measure: return "no_measure";
        case SolveStatus::already_flat: return "already_flat";
        case SolveStatus::flat_at_n_plus_1: return "flat_at_n_plus_1";
        case SolveStatus::flat_at_n_plus_2: return "flat_at_n_plus_2";
    }
    return "no_measure";
}

std::string CaseTag::label() const {
    const bool deg = curve == CanonicalCurve::yx_eq_0;
    switch (kind) {
        case Kind::pure_x_power: return deg ? "deg-I" : "I";
        case Kind::pure_y_power: return deg ? "deg-II" : "II";
        case Kind::y_top_power: return deg ? "deg-II" : "III";
        case Kind::full_s_basis: return deg ? "deg-III" : "IV";
        case Kind::none: return "unclassified";
    }
    return "unclassified";
}

namespace {

double combo_coeff(const Poly& combo, int i, int j) {
    auto it = combo.find(Mono{i, j});
    return it == combo.end() ? 0.0 : it->second;
}

/// Extend beta by two degrees of new pure moments; mixed moments of the new
/// degrees follow from the curve: beta_{ij} = beta_{i-m, j-m} on yx = 1 and
/// beta_{ij} = 0 on yx = 0 (m = min(i, j)).
MomentSequence extend_beta(const MomentSequence& beta, CanonicalCurve curve, double newx1,
                           double newx2, double newy1, double newy2) {
    const int deg = beta.degree();
    MomentSequence b(deg + 2);
    for (Mono m : monomials_upto(deg)) b.at(m.i, m.j) = beta(m);
    const double nx[2] = {newx1, newx2}, ny[2] = {newy1, newy2};
    for (int d = deg + 1; d <= deg + 2; ++d) {
        b.at(0, d) = nx[d - deg - 1];
        b.at(d, 0) = ny[d - deg - 1];
        for (int i = 1; i < d; ++i) {
            int j = d - i;
            int m = std::min(i, j);
            b.at(i, j) = curve == CanonicalCurve::yx_eq_1 ? b.at(i - m, j - m) : 0.0;
        }
    }
    return b;
}

/// Complete a proposed degree-(n+1) block to a flat moment-matrix extension:
/// solve for W, form C = W^T M W, rebuild the extended sequence from the block
/// corners, and verify the assembled blocks form a genuine moment matrix.
Extension flat_extend(const MomentMatrix& M, const MomentSequence& beta,
                      CanonicalCurve curve, const Eigen::MatrixXd& Bblk, double newx1,
                      double newy1) {
    const int n = M.n;
    Eigen::MatrixXd W = lstsq_min_norm_matrix(M.A, Bblk, 1e-13);
    double res = (M.A * W - Bblk).norm();
    if (res > 1e-6 * std::max(1.0, Bblk.norm()))
        throw NoRepresentingMeasure("extension block is not in the range of the base matrix");
    Eigen::MatrixXd C = W.transpose() * M.A * W;
    MomentSequence b1 = extend_beta(beta, curve, newx1, C(0, 0), newy1,
                                    C(C.rows() - 1, C.cols() - 1));
    MomentMatrix M1 = build_moment_matrix(b1, n + 1);
    const int m0 = moment_matrix_size(n), m1 = moment_matrix_size(n + 1);
    Eigen::MatrixXd assembled(m1, m1);
    assembled.topLeftCorner(m0, m0) = M.A;
    assembled.topRightCorner(m0, m1 - m0) = Bblk;
    assembled.bottomLeftCorner(m1 - m0, m0) = Bblk.transpose();
    assembled.bottomRightCorner(m1 - m0, m1 - m0) = C;
    double hank = (M1.A - assembled).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, assembled.cwiseAbs().maxCoeff());
    if (hank > 1e-6 * scale)
        throw NoRepresentingMeasure("completed extension is not a moment matrix");
    return {std::move(b1), std::move(M1), hank, scale};
}

struct FirstDependence {
    bool found = false;
    bool on_y = false;  ///< dependence at a pure-Y column
    int k = -1;
    Poly combo;
};

/// Scan S = 1, X, Y, X^2, Y^2, ..., X^n, Y^n; each member is tested against the
/// span of the earlier members (on the rescaled matrix, combinations mapped back).
FirstDependence first_dependence(const MomentMatrix& M, const Tolerances& tol) {
    auto [Ms, d] = diagonal_rescale(M.A);
    std::vector<Mono> S{{0, 0}};
    for (int k = 1; k <= M.n; ++k) {
        S.push_back(Mono{0, k});
        S.push_back(Mono{k, 0});
    }
    std::vector<Mono> taken;
    for (Mono m : S) {
        const int kcol = monomial_position(m);
        const double cn = Ms.col(kcol).norm();
        if (taken.empty()) {
            if (cn <= tol.residual) return {true, m.j == 0, std::max(m.i, m.j), {}};
            taken.push_back(m);
            continue;
        }
        Eigen::MatrixXd A(Ms.rows(), taken.size());
        for (size_t c = 0; c < taken.size(); ++c)
            A.col(c) = Ms.col(monomial_position(taken[c]));
        auto [w, res] = lstsq_min_norm(A, Ms.col(kcol));
        if (res <= tol.residual * std::max(1.0, cn)) {
            Poly combo;
            for (size_t c = 0; c < taken.size(); ++c)
                combo[taken[c]] = w(c) * d(kcol) / d(monomial_position(taken[c]));
            return {true, m.i > 0, std::max(m.i, m.j), std::move(combo)};
        }
        taken.push_back(m);
    }
    return {};
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& M, const std::vector<int>& idx) {
    Eigen::MatrixXd out(idx.size(), idx.size());
    for (size_t r = 0; r < idx.size(); ++r)
        for (size_t c = 0; c < idx.size(); ++c) out(r, c) = M(idx[r], idx[c]);
    return out;
}

Eigen::VectorXd subvector(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(idx.size());
    for (size_t r = 0; r < idx.size(); ++r) out(r) = v(idx[r]);
    return out;
}

Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& A, const char* what) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw NoRepresentingMeasure(std::string(what) + " is singular");
    return lu.inverse();
}

std::vector<Mono> s_monomials(int n) {
    std::vector<Mono> Sm{{0, 0}};
    for (int k = 1; k <= n; ++k) {
        Sm.push_back(Mono{0, k});
        Sm.push_back(Mono{k, 0});
    }
    return Sm;
}

std::vector<int> positions_of(const std::vector<Mono>& mons) {
    std::vector<int> out;
    out.reserve(mons.size());
    for (Mono m : mons) out.push_back(monomial_position(m));
    return out;
}

/// Least squares of one raw matrix column against a set of raw columns.
LstsqResult lstsq_against_columns(const Eigen::MatrixXd& M, const std::vector<int>& cols,
                                  const Eigen::VectorXd& target) {
    Eigen::MatrixXd A(M.rows(), cols.size());
    for (size_t c = 0; c < cols.size(); ++c) A.col(c) = M.col(cols[c]);
    return lstsq_min_norm(A, target);
}

}  // namespace

std::optional<std::pair<double, double>> solve_bilinear(double a, double b, double c,
                                                        double d) {
    if (std::abs(d) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b), std::abs(c)})) {
        const double den = b * b + c * c;
        if (den <= 1e-14 * std::max(1.0, a * a)) {
            if (std::abs(a) <= 1e-12) return std::make_pair(0.0, 0.0);
            return std::nullopt;
        }
        const double t = -a / den;
        return std::make_pair(b * t, c * t);
    }
    // d (p + c/d)(q + b/d) = bc/d - a
    const double c0 = c / d, b0 = b / d;
    const double m = b0 * c0 - a / d;
    std::vector<std::pair<double, double>> cands;
    if (std::abs(m) <= 1e-14) {
        cands = {{-c0, 0.0}, {0.0, -b0}};
    } else {
        // minimize (t - c0)^2 + (m/t - b0)^2 over stationary t
        for (double t : real_roots({1.0, -c0, 0.0, b0 * m, -m * m}))
            if (std::abs(t) > 1e-300) cands.emplace_back(t - c0, m / t - b0);
    }
    if (cands.empty()) return std::nullopt;
    auto best = *std::min_element(cands.begin(), cands.end(),
                                  [](const auto& l, const auto& r) {
                                      return l.first * l.first + l.second * l.second <
                                             r.first * r.first + r.second * r.second;
                                  });
    auto [p, q] = best;
    // re-solve one variable exactly so the constraint holds to machine precision
    if (std::abs(c + d * p) >= std::abs(b + d * q) && std::abs(c + d * p) > 1e-300)
        q = -(a + b * p) / (c + d * p);
    else if (std::abs(b + d * q) > 1e-300)
        p = -(a + c * q) / (b + d * q);
    return std::make_pair(p, q);
}

PrecheckReport run_precheck(const MomentMatrix& M, CanonicalCurve curve,
                            const Tolerances& tol) {
    PrecheckReport rep;
    auto psd = psd_check(M.A, tol);
    rep.psd = psd.is_psd;
    rep.min_eigenvalue = psd.min_eigenvalue;

    const auto& A = M.A;
    const int cxy = monomial_position(1, 1), c1 = monomial_position(0, 0);
    if (curve == CanonicalCurve::yx_eq_1)
        rep.curve_relation = (A.col(cxy) - A.col(c1)).norm() <=
                             tol.residual * std::max(1.0, A.col(c1).norm());
    else
        rep.curve_relation = A.col(cxy).norm() <= tol.residual * std::max(1.0, A.norm());

    auto cs = column_relations(M, tol);
    rep.recursive = recursive_check(M, relation_polynomials(cs));

    auto rk = moment_matrix_rank(M, tol);
    rep.rank = rk.rank;
    rep.rank_gap_warning = rk.gap_warning;

    Variety V = compute_variety(M, curve, tol);
    rep.variety_finite = V.finite;
    rep.variety_count = V.finite ? static_cast<long long>(V.points.size()) : -1;
    rep.variety_condition = variety_condition(rep.rank, V);

    if (!rep.psd)
        rep.failure = "moment matrix is not positive semidefinite";
    else if (!rep.curve_relation)
        rep.failure = "curve column relation fails";
    else if (!rep.recursive)
        rep.failure = "moment matrix is not recursively generated";
    else if (!rep.variety_condition)
        rep.failure = "variety cardinality is below the rank";
    rep.pass = rep.failure.empty();
    return rep;
}

CaseClassification classify_case(const MomentMatrix& M, CanonicalCurve curve,
                                 const Tolerances& tol) {
    CaseClassification out;
    out.tag.curve = curve;
    auto fd = first_dependence(M, tol);
    if (!fd.found) {
        out.tag.kind = CaseTag::Kind::full_s_basis;
        return out;
    }
    out.tag.k = fd.k;
    out.combo = std::move(fd.combo);
    if (!fd.on_y)
        out.tag.kind = CaseTag::Kind::pure_x_power;
    else if (curve == CanonicalCurve::yx_eq_1 && fd.k == M.n)
        out.tag.kind = CaseTag::Kind::y_top_power;
    else
        out.tag.kind = CaseTag::Kind::pure_y_power;
    return out;
}

Extension extend_recursive_closure(const MomentSequence& beta, const MomentMatrix& M,
                                   CanonicalCurve curve, const Tolerances& tol) {
    (void)tol;
    const int n = M.n;
    const int m0 = moment_matrix_size(n);
    const auto low_monos = monomials_upto(n - 1);
    const auto low = positions_of(low_monos);
    auto relX = lstsq_against_columns(M.A, low, M.A.col(monomial_position(0, n)));
    auto relY = lstsq_against_columns(M.A, low, M.A.col(monomial_position(n, 0)));
    if (relX.residual > 1e-6 * std::max(1.0, M.A.col(monomial_position(0, n)).norm()) ||
        relY.residual > 1e-6 * std::max(1.0, M.A.col(monomial_position(n, 0)).norm()))
        throw NoRepresentingMeasure(
            "flat closure failed: degree-n columns are not spanned by lower degrees");

    Eigen::MatrixXd Bblk = Eigen::MatrixXd::Zero(m0, n + 2);
    for (int c = 0; c <= n + 1; ++c) {
        const int i = c, j = n + 1 - c;
        if (i > 0 && j > 0) {
            if (curve == CanonicalCurve::yx_eq_1)
                Bblk.col(c) = M.A.col(monomial_position(i - 1, j - 1));
        } else if (i == 0) {
            Poly p;
            for (size_t t = 0; t < low_monos.size(); ++t)
                poly_add_term(p, Mono{low_monos[t].i, low_monos[t].j + 1}, relX.w(t));
            Bblk.col(c) = column_of_poly(M, p);
        } else {
            Poly p;
            for (size_t t = 0; t < low_monos.size(); ++t)
                poly_add_term(p, Mono{low_monos[t].i + 1, low_monos[t].j}, relY.w(t));
            Bblk.col(c) = column_of_poly(M, p);
        }
    }
    return flat_extend(M, beta, curve, Bblk, Bblk(monomial_position(0, n), 0),
                       Bblk(monomial_position(n, 0), n + 1));
}

Extension extend_top_y_dependence(const MomentSequence& beta, const MomentMatrix& M,
                                  const Poly& combo, const Tolerances& tol) {
    (void)tol;
    const int n = M.n;
    const double a_n = combo_coeff(combo, 0, n);
    const double relnorm = combo.empty() ? 1.0 : poly_max_abs(combo);
    if (std::abs(a_n) <= 1e-10 * std::max(1.0, relnorm))
        throw NoRepresentingMeasure("top Y dependence lacks the X^n column");
    Poly p, q;  // Y^n = a_n X^n + p(X) + q(Y)
    for (const auto& [m, c] : combo) {
        if (m.i == 0 && m.j < n) p[m] = c;
        if (m.j == 0 && m.i > 0) q[m] = c;
    }
    const int m0 = moment_matrix_size(n);
    Eigen::MatrixXd Bblk = Eigen::MatrixXd::Zero(m0, n + 2);
    // X^{n+1} = (1/a_n) (Y^{n-1} - X p(X) - X q(Y))
    Poly tx{{Mono{n - 1, 0}, 1.0}};
    for (const auto& [m, c] : p) poly_add_term(tx, Mono{m.i, m.j + 1}, -c);
    for (const auto& [m, c] : q) poly_add_term(tx, Mono{m.i, m.j + 1}, -c);
    for (auto& [m, c] : tx) c /= a_n;
    Bblk.col(0) = column_of_poly(M, tx);
    for (int t = 1; t <= n; ++t) Bblk.col(t) = M.A.col(monomial_position(t - 1, n - t));
    // Y^{n+1} = a_n X^{n-1} + Y p(X) + Y q(Y)
    Poly ty{{Mono{0, n - 1}, a_n}};
    for (const auto& [m, c] : p) poly_add_term(ty, Mono{m.i + 1, m.j}, c);
    for (const auto& [m, c] : q) poly_add_term(ty, Mono{m.i + 1, m.j}, c);
    Bblk.col(n + 1) = column_of_poly(M, ty);
    return flat_extend(M, beta, CanonicalCurve::yx_eq_1, Bblk,
                       Bblk(monomial_position(0, n), 0),
                       Bblk(monomial_position(n, 0), n + 1));
}

FullRankResult extend_full_rank(const MomentSequence& beta, const MomentMatrix& M,
                                const ForcedParameters& forced, const Tolerances& tol) {
    const int n = M.n;
    const auto mons = monomials_upto(n);
    const auto Sm = s_monomials(n);
    const auto S = positions_of(Sm);
    Eigen::MatrixXd Ninv = guarded_inverse(submatrix(M.A, S), "S-compression of the base");

    auto xcol = [&](double p) {
        Eigen::VectorXd v(mons.size());
        for (size_t r = 0; r < mons.size(); ++r) {
            auto [i, j] = mons[r];
            v(r) = i >= 1 ? beta.at(i - 1, n + j) : (j < n ? beta.at(0, n + 1 + j) : p);
        }
        return v;
    };
    auto ycol = [&](double q) {
        Eigen::VectorXd v(mons.size());
        for (size_t r = 0; r < mons.size(); ++r) {
            auto [i, j] = mons[r];
            v(r) = j >= 1 ? beta.at(n + i, j - 1) : (i < n ? beta.at(n + 1 + i, 0) : q);
        }
        return v;
    };
    auto eta = [&](double p, double q) {
        return subvector(xcol(p), S).dot(Ninv * subvector(ycol(q), S));
    };

    const double e00 = eta(0, 0), e10 = eta(1, 0), e01 = eta(0, 1), e11 = eta(1, 1);
    BilinearForm form{e00, e10 - e00, e01 - e00, e11 - e10 - e01 + e00};
    const double b00 = beta.at(0, 0);

    const bool have_forced = forced.p.has_value() && forced.q.has_value();
    std::optional<std::pair<double, double>> pq;
    if (have_forced) {
        pq = std::make_pair(*forced.p, *forced.q);
    } else {
        pq = solve_bilinear(form.a - b00, form.b, form.c, form.d);
        if (pq) {  // two exact affine corrections against the true evaluator
            for (int it = 0; it < 2; ++it) {
                auto& [p_, q_] = *pq;
                const double g0 = eta(p_, q_) - b00;
                const double dq = eta(p_, q_ + 1.0) - eta(p_, q_);
                const double dp = eta(p_ + 1.0, q_) - eta(p_, q_);
                if (std::abs(dq) >= std::abs(dp) && std::abs(dq) > 1e-300)
                    q_ -= g0 / dq;
                else if (std::abs(dp) > 1e-300)
                    p_ -= g0 / dp;
            }
        }
    }

    if (pq && std::abs(eta(pq->first, pq->second) - b00) <= 1e-6 * std::max(1.0, std::abs(b00))) {
        const auto [p_, q_] = *pq;
        Eigen::MatrixXd Bblk(moment_matrix_size(n), n + 2);
        Bblk.col(0) = xcol(p_);
        for (int t = 1; t <= n; ++t)
            Bblk.col(t) = M.A.col(monomial_position(t - 1, n - t));
        Bblk.col(n + 1) = ycol(q_);
        FullRankResult out;
        out.status = SolveStatus::flat_at_n_plus_1;
        out.first = flat_extend(M, beta, CanonicalCurve::yx_eq_1, Bblk, p_, q_);
        out.params.p = p_;
        out.params.q = q_;
        out.form = form;
        return out;
    }

    // no flat one-step extension: increase the rank once, then close at n+1
    double p_ = 0.0, q_ = 0.0;
    if (have_forced) {
        p_ = *forced.p;
        q_ = *forced.q;
    }
    Eigen::VectorXd xS = subvector(xcol(p_), S), yS = subvector(ycol(q_), S);
    const double tau = xS.dot(Ninv * xS);
    const double u_ = forced.u.value_or(tau + 1.0);
    if (u_ - tau <= 1e-12 * std::max({1.0, std::abs(u_), std::abs(tau)}))
        throw NoRepresentingMeasure(
            "second-stage extension needs the new even moment above its flat threshold");
    const int ns = static_cast<int>(S.size());
    Eigen::MatrixXd At(ns + 1, ns + 1);
    At.topLeftCorner(ns, ns) = submatrix(M.A, S);
    At.topRightCorner(ns, 1) = xS;
    At.bottomLeftCorner(1, ns) = xS.transpose();
    At(ns, ns) = u_;
    Eigen::VectorXd yv(ns + 1);
    yv.head(ns) = yS;
    yv(ns) = b00;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(At);
    if (!lu.isInvertible())
        throw NoRepresentingMeasure("bordered S-compression is singular");
    Eigen::VectorXd aco = lu.solve(yv);
    const double rho_c = aco.dot(yv);

    MomentSequence b1 = extend_beta(beta, CanonicalCurve::yx_eq_1, p_, u_, q_, rho_c);
    MomentMatrix M1 = build_moment_matrix(b1, n + 1);
    std::vector<int> Btil = S;
    Btil.push_back(monomial_position(0, n + 1));
    const Eigen::VectorXd target = M1.A.col(monomial_position(n + 1, 0));
    auto rel = lstsq_against_columns(M1.A, Btil, target);
    if (rel.residual > 1e-6 * std::max(1.0, target.norm()))
        throw NoRepresentingMeasure("second stage: Y^{n+1} is not spanned as required");
    Poly combo;
    std::vector<Mono> bm = Sm;
    bm.push_back(Mono{0, n + 1});
    for (size_t c = 0; c < bm.size(); ++c) combo[bm[c]] = rel.w(c);

    FullRankResult out;
    out.status = SolveStatus::flat_at_n_plus_2;
    out.first = Extension{b1, M1, 0.0, std::max(1.0, M1.A.cwiseAbs().maxCoeff())};
    out.second = extend_top_y_dependence(b1, M1, combo, tol);
    out.params.p = p_;
    out.params.q = q_;
    out.params.u = u_;
    out.params.v = rho_c;
    out.form = form;
    return out;
}

Extension extend_degenerate_pure_x(const MomentSequence& beta, const MomentMatrix& M,
                                   int k, const Poly& combo, const Tolerances& tol) {
    (void)tol;
    const int n = M.n;
    const double relsc = combo.empty() ? 1.0 : poly_max_abs(combo);
    Poly tx;  // X^{n+1} = sum_{j>=1} a_j X^{n+1-k+j}
    for (const auto& [m, c] : combo)
        if (m.i == 0 && m.j >= 1 && std::abs(c) > 1e-9 * std::max(1.0, relsc))
            poly_add_term(tx, Mono{0, n + 1 - k + m.j}, c);
    const int m0 = moment_matrix_size(n);
    Eigen::MatrixXd Bblk = Eigen::MatrixXd::Zero(m0, n + 2);
    if (!tx.empty()) Bblk.col(0) = column_of_poly(M, tx);
    // Y^{n+1}: determined down the pure-Y rows, free at the last one (q := 0)
    Eigen::VectorXd yc = Eigen::VectorXd::Zero(m0);
    for (int i = 0; i < n; ++i) yc(monomial_position(i, 0)) = beta.at(n + 1 + i, 0);
    Bblk.col(n + 1) = yc;
    return flat_extend(M, beta, CanonicalCurve::yx_eq_0, Bblk,
                       Bblk(monomial_position(0, n), 0), 0.0);
}

Extension extend_degenerate_pure_y(const MomentSequence& beta, const MomentMatrix& M,
                                   int k, const Poly& combo, const Tolerances& tol) {
    (void)tol;
    const int n = M.n;
    const double a_k = combo_coeff(combo, 0, k);
    const double relnorm = combo.empty() ? 1.0 : poly_max_abs(combo);
    if (std::abs(a_k) <= 1e-10 * std::max(1.0, relnorm))
        throw NoRepresentingMeasure("pure Y dependence lacks the X^k column (swap first)");
    // relation: Y^k = a0 + a1 X + ... + a_k X^k + b1 Y + ... + b_{k-1} Y^{k-1}
    Poly ty;  // Y^{n+1} = a0 Y^{n+1-k} + sum_i b_i Y^{n+1-k+i}
    poly_add_term(ty, Mono{n + 1 - k, 0}, combo_coeff(combo, 0, 0));
    for (int i = 1; i < k; ++i)
        poly_add_term(ty, Mono{n + 1 - k + i, 0}, combo_coeff(combo, i, 0));
    Poly tx;  // X^{n+1} from X^k = (Y^k - rest)/a_k, keeping only the X parts
    poly_add_term(tx, Mono{0, n + 1 - k}, -combo_coeff(combo, 0, 0) / a_k);
    for (int j = 1; j < k; ++j)
        poly_add_term(tx, Mono{0, n + 1 - k + j}, -combo_coeff(combo, 0, j) / a_k);
    const int m0 = moment_matrix_size(n);
    Eigen::MatrixXd Bblk = Eigen::MatrixXd::Zero(m0, n + 2);
    Bblk.col(0) = column_of_poly(M, tx);
    Bblk.col(n + 1) = column_of_poly(M, ty);
    return flat_extend(M, beta, CanonicalCurve::yx_eq_0, Bblk,
                       Bblk(monomial_position(0, n), 0),
                       Bblk(monomial_position(n, 0), n + 1));
}

FullRankResult extend_degenerate_full_rank(const MomentSequence& beta,
                                           const MomentMatrix& M,
                                           const ForcedParameters& forced,
                                           const Tolerances& tol) {
    (void)tol;
    const int n = M.n;
    const auto Sm = s_monomials(n);
    const auto S = positions_of(Sm);
    Eigen::MatrixXd Ainv = guarded_inverse(submatrix(M.A, S), "S-compression of the base");

    auto rp = [&](double p) {  // new X^{n+1} column compressed to S rows
        Eigen::VectorXd v = Eigen::VectorXd::Zero(Sm.size());
        for (size_t idx = 0; idx < Sm.size(); ++idx)
            if (Sm[idx].i == 0)
                v(idx) = Sm[idx].j < n ? beta.at(0, n + 1 + Sm[idx].j) : p;
        return v;
    };
    auto sq = [&](double q) {  // new Y^{n+1} column compressed to S rows
        Eigen::VectorXd v = Eigen::VectorXd::Zero(Sm.size());
        for (size_t idx = 0; idx < Sm.size(); ++idx) {
            auto [i, j] = Sm[idx];
            if (j == 0 && i > 0)
                v(idx) = i < n ? beta.at(n + 1 + i, 0) : q;
            else if (i == 0 && j == 0)
                v(idx) = beta.at(n + 1, 0);
        }
        return v;
    };
    auto alpha = [&](double p, double q) { return sq(q).dot(Ainv * rp(p)); };

    const double e00 = alpha(0, 0), e10 = alpha(1, 0), e01 = alpha(0, 1), e11 = alpha(1, 1);
    BilinearForm form{e00, e10 - e00, e01 - e00, e11 - e10 - e01 + e00};

    const bool have_forced = forced.p.has_value() && forced.q.has_value();
    std::optional<std::pair<double, double>> pq;
    if (have_forced) {
        pq = std::make_pair(*forced.p, *forced.q);
    } else {
        pq = solve_bilinear(form.a, form.b, form.c, form.d);
        if (pq) {
            for (int it = 0; it < 2; ++it) {
                auto& [p_, q_] = *pq;
                const double g0 = alpha(p_, q_);
                const double dq = alpha(p_, q_ + 1.0) - alpha(p_, q_);
                const double dp = alpha(p_ + 1.0, q_) - alpha(p_, q_);
                if (std::abs(dq) >= std::abs(dp) && std::abs(dq) > 1e-300)
                    q_ -= g0 / dq;
                else if (std::abs(dp) > 1e-300)
                    p_ -= g0 / dp;
            }
        }
    }

    const int m0 = moment_matrix_size(n);
    const double fscale =
        std::max({1.0, std::abs(form.a), std::abs(form.b), std::abs(form.c), std::abs(form.d)});
    if (pq && std::abs(alpha(pq->first, pq->second)) <= 1e-6 * fscale) {
        const auto [p_, q_] = *pq;
        Eigen::MatrixXd Bblk = Eigen::MatrixXd::Zero(m0, n + 2);
        Eigen::VectorXd xc = Eigen::VectorXd::Zero(m0), yc = Eigen::VectorXd::Zero(m0);
        for (int i = 0; i < n; ++i) {
            xc(monomial_position(0, i)) = beta.at(0, n + 1 + i);
            yc(monomial_position(i, 0)) = i ? beta.at(n + 1 + i, 0) : beta.at(n + 1, 0);
        }
        xc(monomial_position(0, n)) = p_;
        yc(monomial_position(n, 0)) = q_;
        Bblk.col(0) = xc;
        Bblk.col(n + 1) = yc;
        FullRankResult out;
        out.status = SolveStatus::flat_at_n_plus_1;
        out.first = flat_extend(M, beta, CanonicalCurve::yx_eq_0, Bblk, p_, q_);
        out.params.p = p_;
        out.params.q = q_;
        out.form = form;
        return out;
    }

    double p_ = 0.0, q_ = 0.0;
    if (have_forced) {
        p_ = *forced.p;
        q_ = *forced.q;
    }
    const double tau = rp(p_).dot(Ainv * rp(p_));
    const double u_ = forced.u.value_or(tau + 1.0);
    if (u_ - tau <= 1e-12 * std::max({1.0, std::abs(u_), std::abs(tau)}))
        throw NoRepresentingMeasure(
            "second-stage extension needs the new even moment above its flat threshold");
    const double al = alpha(p_, q_);
    const double v_ = al * al / (u_ - tau) + sq(q_).dot(Ainv * sq(q_));

    MomentSequence b1 = extend_beta(beta, CanonicalCurve::yx_eq_0, p_, u_, q_, v_);
    MomentMatrix M1 = build_moment_matrix(b1, n + 1);
    std::vector<int> Btil = S;
    Btil.push_back(monomial_position(0, n + 1));
    const Eigen::VectorXd target = M1.A.col(monomial_position(n + 1, 0));
    auto rel = lstsq_against_columns(M1.A, Btil, target);
    if (rel.residual > 1e-6 * std::max(1.0, target.norm()))
        throw NoRepresentingMeasure("second stage: Y^{n+1} is not spanned as required");
    std::vector<Mono> bm = Sm;
    bm.push_back(Mono{0, n + 1});
    Poly combo;
    for (size_t c = 0; c < bm.size(); ++c) combo[bm[c]] = rel.w(c);

    // Y^{n+2} column: Y times the pure-Y part of the Y^{n+1} relation
    const int m1 = moment_matrix_size(n + 1);
    Eigen::VectorXd colY = combo_coeff(combo, 0, 0) * M1.A.col(monomial_position(1, 0));
    for (int i = 1; i <= n; ++i)
        colY += combo_coeff(combo, i, 0) * M1.A.col(monomial_position(i + 1, 0));
    const double s_ = colY(monomial_position(n + 1, 0));

    // X^{n+2} column: all entries forced except the top one, pinned by
    // orthogonality to Y^{n+1}
    Eigen::MatrixXd Atinv = guarded_inverse(submatrix(M1.A, Btil), "extended S-compression");
    Eigen::VectorXd yB = subvector(target, Btil);
    Eigen::VectorXd xcol = Eigen::VectorXd::Zero(m1);
    for (int i = 0; i <= n; ++i) xcol(monomial_position(0, i)) = b1.at(0, n + 2 + i);
    Eigen::VectorXd base = subvector(xcol, Btil);
    Eigen::VectorXd er = Eigen::VectorXd::Zero(Btil.size());
    er(Btil.size() - 1) = 1.0;
    const double c1 = yB.dot(Atinv * er);
    if (std::abs(c1) < 1e-300)
        throw NoRepresentingMeasure("second stage: the top X moment is unconstrained");
    const double r_ = -yB.dot(Atinv * base) / c1;
    xcol(monomial_position(0, n + 1)) = r_;

    Eigen::MatrixXd Bb = Eigen::MatrixXd::Zero(m1, n + 3);
    Bb.col(0) = xcol;
    Bb.col(n + 2) = colY;

    FullRankResult out;
    out.status = SolveStatus::flat_at_n_plus_2;
    out.first = Extension{b1, M1, 0.0, std::max(1.0, M1.A.cwiseAbs().maxCoeff())};
    out.second = flat_extend(M1, b1, CanonicalCurve::yx_eq_0, Bb, r_, s_);
    out.params.p = p_;
    out.params.q = q_;
    out.params.u = u_;
    out.params.v = v_;
    out.params.r = r_;
    out.params.s = s_;
    out.form = form;
    return out;
}

namespace {

SolverParameters swap_params(const SolverParameters& in) {
    SolverParameters out;
    out.p = in.q;
    out.q = in.p;
    out.u = in.v;
    out.v = in.u;
    out.r = in.s;
    out.s = in.r;
    return out;
}

std::optional<Extension> swap_extension(const std::optional<Extension>& ext) {
    if (!ext) return std::nullopt;
    MomentSequence b = ext->beta.swapped_xy();
    MomentMatrix M = build_moment_matrix(b, ext->M.n);
    return Extension{std::move(b), std::move(M), ext->hankel_defect, ext->hankel_scale};
}

}  // namespace

SolverOutcome solve_canonical(const MomentSequence& beta, CanonicalCurve curve,
                              const Tolerances& tol, const ForcedParameters& forced) {
    tol.validate();
    if (beta.degree() < 4 || beta.degree() % 2 != 0)
        throw std::invalid_argument("solve_canonical: degree must be even and at least 4");
    const int n = beta.degree() / 2;

    SolverOutcome out;
    out.tag.curve = curve;
    if (beta.at(0, 0) <= 0.0) {
        out.status = SolveStatus::no_measure;
        out.failure = "total mass beta_00 must be positive";
        return out;
    }

    MomentMatrix M = build_moment_matrix(beta, n);
    out.precheck = run_precheck(M, curve, tol);
    out.rank = out.precheck.rank;
    if (out.precheck.rank_gap_warning)
        out.warnings.push_back("numeric rank decision is ill-separated");
    if (!out.precheck.pass) {
        out.status = SolveStatus::no_measure;
        out.failure = out.precheck.failure;
        return out;
    }

    auto cls = classify_case(M, curve, tol);
    out.tag = cls.tag;

    try {
        const int rank_low = moment_matrix_rank(build_moment_matrix(beta, n - 1), tol).rank;
        if (rank_low == out.rank) {
            out.first = extend_recursive_closure(beta, M, curve, tol);
            out.status = SolveStatus::already_flat;
        } else if (cls.tag.kind == CaseTag::Kind::full_s_basis) {
            FullRankResult res = curve == CanonicalCurve::yx_eq_1
                                     ? extend_full_rank(beta, M, forced, tol)
                                     : extend_degenerate_full_rank(beta, M, forced, tol);
            out.status = res.status;
            out.first = std::move(res.first);
            out.second = std::move(res.second);
            out.params = res.params;
            out.flatness_form = res.form;
        } else if (curve == CanonicalCurve::yx_eq_1) {
            if (cls.tag.kind == CaseTag::Kind::y_top_power) {
                out.first = extend_top_y_dependence(beta, M, cls.combo, tol);
                out.status = SolveStatus::flat_at_n_plus_1;
            } else {
                // a dependence before Y^n forces flatness; the rank test just missed it
                out.first = extend_recursive_closure(beta, M, curve, tol);
                out.status = SolveStatus::already_flat;
                out.warnings.push_back("flatness detected through the S-scan dependence");
            }
        } else if (cls.tag.kind == CaseTag::Kind::pure_x_power) {
            const double relsc = cls.combo.empty() ? 0.0 : poly_max_abs(cls.combo);
            bool has_y = false;
            for (const auto& [m, c] : cls.combo)
                if (m.i > 0 && std::abs(c) > 1e-7 * std::max(1.0, relsc)) has_y = true;
            if (has_y) {
                // a Y term in the X^k relation forces flatness under the variety condition
                out.first = extend_recursive_closure(beta, M, curve, tol);
                out.status = SolveStatus::already_flat;
                out.warnings.push_back("flatness detected through the S-scan dependence");
            } else if (std::abs(combo_coeff(cls.combo, 0, 0)) > 1e-7 * std::max(1.0, relsc)) {
                throw NoRepresentingMeasure(
                    "pure X^k relation with a constant term admits no measure on yx = 0");
            } else {
                out.first = extend_degenerate_pure_x(beta, M, cls.tag.k, cls.combo, tol);
                out.status = SolveStatus::flat_at_n_plus_1;
            }
        } else {
            const double a_k = combo_coeff(cls.combo, 0, cls.tag.k);
            const double relnorm = cls.combo.empty() ? 1.0 : poly_max_abs(cls.combo);
            if (std::abs(a_k) > 1e-10 * std::max(1.0, relnorm)) {
                out.first = extend_degenerate_pure_y(beta, M, cls.tag.k, cls.combo, tol);
                out.status = SolveStatus::flat_at_n_plus_1;
            } else {
                // the relation has no X^k column: swap coordinates and delegate
                ForcedParameters swapped_forced{forced.q, forced.p, std::nullopt};
                if (forced.u)
                    out.warnings.push_back("forced even moment ignored across the swap");
                SolverOutcome inner =
                    solve_canonical(beta.swapped_xy(), curve, tol, swapped_forced);
                out.status = inner.status;
                out.failure = inner.failure;
                out.params = swap_params(inner.params);
                out.flatness_form = inner.flatness_form;
                out.first = swap_extension(inner.first);
                out.second = swap_extension(inner.second);
                out.swapped_xy = true;
                for (const Atom& a : inner.measure.atoms)
                    out.measure.atoms.push_back({a.y, a.x, a.density});
                for (auto& w : inner.warnings) out.warnings.push_back(std::move(w));
                out.warnings.push_back("solved in swapped coordinates (case " +
                                       inner.tag.label() + ")");
                if (out.status == SolveStatus::no_measure) return out;
                sort_atoms(out.measure);
                out.max_residual = verify_measure(out.measure, beta, tol).max_residual;
                return out;
            }
        }

        if (out.status == SolveStatus::flat_at_n_plus_2)
            out.measure = extract_measure(out.first->beta, out.first->M, out.second->M,
                                          curve, tol);
        else
            out.measure = extract_measure(beta, M, out.first->M, curve, tol);
        sort_atoms(out.measure);
        out.max_residual = verify_measure(out.measure, beta, tol).max_residual;
    } catch (const NoRepresentingMeasure& e) {
        out.status = SolveStatus::no_measure;
        out.failure = e.what();
        out.measure = {};
        out.first.reset();
        out.second.reset();
    }
    return out;
}

GeneralOutcome solve(const MomentSequence& beta, const Conic& Q, const Tolerances& tol,
                     const ForcedParameters& forced) {
    GeneralOutcome out;
    out.conic_class = classify(Q);
    out.normalization = normalize_hyperbola(Q);  // throws UnsupportedCurve otherwise
    const DegreeOneMap psi = invert(out.normalization.phi);
    MomentSequence canonical_beta = transform_moments(beta, psi);
    out.canonical = solve_canonical(canonical_beta, out.normalization.canonical, tol, forced);
    out.measure = pushforward_measure(out.canonical.measure, out.normalization.phi);
    sort_atoms(out.measure);
    return out;
}

}  // namespace hypermoment
