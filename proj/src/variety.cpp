#include "hypermoment/variety.hpp"

#include <algorithm>
#include <cmath>

#include "hypermoment/errors.hpp"

namespace hypermoment {

namespace {

double polyval(const std::vector<double>& cf, double x) {
    double acc = 0.0;
    for (double c : cf) acc = acc * x + c;
    return acc;
}

std::vector<double> polyder(const std::vector<double>& cf) {
    const int deg = static_cast<int>(cf.size()) - 1;
    std::vector<double> out;
    for (int k = 0; k < deg; ++k) out.push_back(cf[k] * (deg - k));
    return out;
}

double polish_root(const std::vector<double>& cf, double x, int iters = 3) {
    const auto der = polyder(cf);
    double best = std::abs(polyval(cf, x));
    for (int it = 0; it < iters; ++it) {
        double f = polyval(cf, x);
        double fp = polyval(der, x);
        if (std::abs(fp) < 1e-300) break;
        double step = f / fp;
        if (!std::isfinite(step)) break;
        // near a multiple root f and f' are both rounding noise while their
        // ratio is O(1); only move when the residual actually drops
        double xn = x - step;
        double fn = std::abs(polyval(cf, xn));
        if (fn >= best) break;
        x = xn;
        best = fn;
    }
    return x;
}

// Evaluation scale of a polynomial at a point: dominates |p(x, y)| termwise.
double poly_eval_scale(const Poly& p, double x, double y) {
    double acc = 0.0;
    for (const auto& [m, c] : p)
        acc += std::abs(c) * std::pow(std::max(1.0, std::abs(y)), m.i) *
               std::pow(std::max(1.0, std::abs(x)), m.j);
    return std::max(1.0, acc);
}

struct MembershipFilter {
    Eigen::MatrixXd K;
    Eigen::VectorXd d;
    const std::vector<Poly>* polys;
    std::vector<Mono> mons;
    double tol;

    bool contains(double x, double y) const {
        Eigen::VectorXd v(mons.size());
        for (size_t r = 0; r < mons.size(); ++r)
            v(r) = std::pow(y, mons[r].i) * std::pow(x, mons[r].j) / d(r);
        if ((K * v).norm() > tol * std::max(v.norm(), 1e-300)) return false;
        for (const Poly& p : *polys)
            if (std::abs(poly_eval(p, x, y)) > tol * poly_eval_scale(p, x, y)) return false;
        return true;
    }
};

std::vector<std::pair<double, double>> dedupe_points(
    std::vector<std::pair<double, double>> pts, const Tolerances& tol) {
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pts) {
        bool dup = false;
        for (const auto& q : out)
            if (std::abs(p.first - q.first) + std::abs(p.second - q.second) <=
                tol.dedupe * std::max(1.0, std::abs(p.first) + std::abs(p.second))) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(p);
    }
    return out;
}

Variety variety_on_yx1(const std::vector<Poly>& polys, const MembershipFilter& f,
                       const Tolerances& tol) {
    // Substitute y = 1/x into each relation and clear denominators by x^(max i).
    std::vector<double> cand;
    for (const Poly& poly : polys) {
        if (poly.empty()) continue;
        int iy = 0, deg = 0;
        for (const auto& [m, c] : poly) iy = std::max(iy, m.i);
        for (const auto& [m, c] : poly) deg = std::max(deg, m.j + (iy - m.i));
        std::vector<double> cf(deg + 1, 0.0);
        for (const auto& [m, c] : poly) cf[deg - (m.j + iy - m.i)] += c;
        double cmax = 0.0;
        for (double c : cf) cmax = std::max(cmax, std::abs(c));
        if (cmax > 1e-8 * poly_max_abs(poly))
            for (double r : real_roots(cf, tol)) cand.push_back(r);
    }
    if (cand.empty()) return {{}, false};
    std::vector<std::pair<double, double>> pts;
    for (double x : cand)
        if (std::abs(x) > 1e-12 && f.contains(x, 1.0 / x)) pts.emplace_back(x, 1.0 / x);
    return {dedupe_points(std::move(pts), tol), true};
}

Variety variety_on_yx0(const std::vector<Poly>& polys, const MembershipFilter& f,
                       const Tolerances& tol) {
    // Each axis is handled by restricting every relation to it; a branch with no
    // surviving restriction is unconstrained, making the whole variety infinite.
    auto branch = [&](bool x_axis) -> std::optional<std::vector<std::pair<double, double>>> {
        std::vector<std::vector<double>> univs;
        for (const Poly& poly : polys) {
            if (poly.empty()) continue;
            std::map<int, double> cf;
            for (const auto& [m, c] : poly) {
                if (x_axis && m.i == 0) cf[m.j] += c;
                if (!x_axis && m.j == 0) cf[m.i] += c;
            }
            if (cf.empty()) continue;
            double cmax = 0.0;
            for (const auto& [dd, c] : cf) cmax = std::max(cmax, std::abs(c));
            if (cmax <= 1e-8 * poly_max_abs(poly)) continue;
            int deg = cf.rbegin()->first;
            std::vector<double> arr(deg + 1, 0.0);
            for (const auto& [dd, c] : cf) arr[deg - dd] = c;
            univs.push_back(std::move(arr));
        }
        if (univs.empty()) return std::nullopt;
        std::vector<std::pair<double, double>> out;
        for (const auto& u : univs)
            for (double t : real_roots(u, tol)) {
                double x = x_axis ? t : 0.0, y = x_axis ? 0.0 : t;
                if (f.contains(x, y)) out.emplace_back(x, y);
            }
        return out;
    };
    auto bx = branch(true);
    auto by = branch(false);
    if (!bx || !by) return {{}, false};
    bx->insert(bx->end(), by->begin(), by->end());
    return {dedupe_points(std::move(*bx), tol), true};
}

}  // namespace

std::vector<double> real_roots(const std::vector<double>& coeffs, const Tolerances& tol) {
    std::vector<double> cf;
    bool leading = true;
    for (double c : coeffs) {
        if (leading && c == 0.0) continue;
        leading = false;
        cf.push_back(c);
    }
    if (cf.size() <= 1) return {};
    const int n = static_cast<int>(cf.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) comp(0, k) = -cf[k + 1] / cf[0];
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    const auto& ev = es.eigenvalues();
    double scale = 1.0;
    for (int k = 0; k < ev.size(); ++k) scale = std::max(scale, std::abs(ev(k)));
    std::vector<double> out;
    for (int k = 0; k < ev.size(); ++k)
        if (std::abs(ev(k).imag()) <= tol.root_imag * scale)
            out.push_back(polish_root(cf, ev(k).real()));
    std::sort(out.begin(), out.end());
    return out;
}

Variety compute_variety(const MomentMatrix& M, CanonicalCurve curve, const Tolerances& tol) {
    auto [K, d] = kernel_basis(M.A, tol);
    auto polys = relation_polynomials(column_relations(M, tol));
    // The membership test runs two orders of magnitude looser than the relation
    // residual: candidate roots inherit amplified error through the high-degree
    // curve substitution.
    MembershipFilter f{std::move(K), std::move(d), &polys, monomials_upto(M.n),
                       100.0 * tol.residual};
    return curve == CanonicalCurve::yx_eq_1 ? variety_on_yx1(polys, f, tol)
                                            : variety_on_yx0(polys, f, tol);
}

bool variety_condition(int rank, const Variety& V) {
    return !V.finite || rank <= static_cast<int>(V.points.size());
}

AtomicMeasure extract_measure(const MomentSequence& base_beta, const MomentMatrix& base_M,
                              const MomentMatrix& ext_M, CanonicalCurve curve,
                              const Tolerances& tol) {
    const auto basis = column_relations(base_M, tol).basis;
    relations_against_basis(ext_M, basis);  // extension must stay flat over the basis
    Variety V = compute_variety(ext_M, curve, tol);
    if (!V.finite)
        throw NoRepresentingMeasure("flat extension has an infinite variety");
    if (V.points.size() != basis.size())
        throw NoRepresentingMeasure("variety cardinality does not match the base rank");
    if (V.points.empty()) return {};

    const auto keys = monomials_upto(base_beta.degree());
    const int rows = static_cast<int>(keys.size());
    const int cols = static_cast<int>(V.points.size());
    Eigen::MatrixXd Vd(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
        rhs(r) = base_beta.at(keys[r].i, keys[r].j);
        for (int c = 0; c < cols; ++c)
            Vd(r, c) = std::pow(V.points[c].second, keys[r].i) *
                       std::pow(V.points[c].first, keys[r].j);
    }
    Eigen::VectorXd rw = rhs.cwiseAbs().cwiseMax(1.0).cwiseInverse();
    Eigen::VectorXd cs(cols);
    for (int c = 0; c < cols; ++c) cs(c) = std::max(Vd.col(c).cwiseAbs().maxCoeff(), 1e-300);
    Eigen::MatrixXd A = rw.asDiagonal() * Vd * cs.cwiseInverse().asDiagonal();
    Eigen::VectorXd z = lstsq_min_norm(A, rw.asDiagonal() * rhs, 1e-14).w;
    if (z.minCoeff() <= -1e-9 * std::max(1e-300, z.cwiseAbs().maxCoeff()))
        throw NoRepresentingMeasure("extraction produced a negative density");
    AtomicMeasure mu;
    for (int c = 0; c < cols; ++c)
        mu.atoms.push_back(
            {V.points[c].first, V.points[c].second, std::max(z(c), 0.0) / cs(c)});
    return mu;
}

}  // namespace hypermoment
