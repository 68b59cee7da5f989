#include "hypermoment/conic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypermoment/errors.hpp"

namespace hypermoment {

double Conic::scale() const {
    double s = 0.0;
    for (double v : {xx, xy, yy, x, y, c}) s = std::max(s, std::abs(v));
    return s;
}

std::string to_string(ConicClass c) {
    switch (c) {
        case ConicClass::nondegenerate_hyperbola: return "nondegenerate_hyperbola";
        case ConicClass::degenerate_hyperbola: return "degenerate_hyperbola";
        case ConicClass::ellipse: return "ellipse";
        case ConicClass::parabola: return "parabola";
        case ConicClass::line: return "line";
        case ConicClass::parallel_lines: return "parallel_lines";
        case ConicClass::point: return "point";
        case ConicClass::empty_set: return "empty_set";
        case ConicClass::other: return "other";
    }
    return "other";
}

ConicClass classify(const Conic& Q, double rel_tol) {
    const double s = Q.scale();
    if (s <= 0.0) return ConicClass::other;
    const double s2 = std::max({std::abs(Q.xx), std::abs(Q.xy), std::abs(Q.yy)});

    if (s2 <= rel_tol * s) {  // no quadratic part: a line, or no locus at all
        if (std::max(std::abs(Q.x), std::abs(Q.y)) > rel_tol * s) return ConicClass::line;
        return std::abs(Q.c) > rel_tol * s ? ConicClass::empty_set : ConicClass::other;
    }

    const double delta2 = Q.xx * Q.yy - 0.25 * Q.xy * Q.xy;
    const double delta3 = Q.xx * (Q.yy * Q.c - 0.25 * Q.y * Q.y) -
                          0.5 * Q.xy * (0.5 * Q.xy * Q.c - 0.25 * Q.y * Q.x) +
                          0.5 * Q.x * (0.25 * Q.xy * Q.y - 0.5 * Q.yy * Q.x);
    const double tau2 = rel_tol * s2 * s2;
    const double tau3 = rel_tol * s * s * s;

    if (delta2 < -tau2)
        return std::abs(delta3) > tau3 ? ConicClass::nondegenerate_hyperbola
                                       : ConicClass::degenerate_hyperbola;
    if (delta2 > tau2) {
        if (std::abs(delta3) <= tau3) return ConicClass::point;
        return delta3 * (Q.xx + Q.yy) < 0 ? ConicClass::ellipse : ConicClass::empty_set;
    }
    // parabolic family: rank-one quadratic part
    if (std::abs(delta3) > tau3) return ConicClass::parabola;
    // Q = k (main axis + m * other)^2 + linear + c; by delta3 ~ 0 the linear part is
    // aligned with the squared line, so the locus is a univariate quadratic in it.
    double k, d, e, c0 = Q.c;
    if (std::abs(Q.xx) >= std::abs(Q.yy)) {
        k = Q.xx;
        d = Q.x;  // coefficient along the squared line u + m v
        e = Q.y - Q.x * (Q.xy / (2 * Q.xx));
    } else {
        k = Q.yy;
        d = Q.y;
        e = Q.x - Q.y * (Q.xy / (2 * Q.yy));
    }
    if (std::abs(e) > rel_tol * s) return ConicClass::parabola;  // numerically borderline
    const double disc = d * d - 4 * k * c0;
    const double taud = rel_tol * s * s;
    if (disc > taud) return ConicClass::parallel_lines;
    if (disc < -taud) return ConicClass::empty_set;
    return ConicClass::line;
}

DegreeOneMap invert(const DegreeOneMap& phi) {
    const double det = phi.det();
    double nrm = std::max({std::abs(phi.b1), std::abs(phi.c1), std::abs(phi.b2),
                           std::abs(phi.c2)});
    if (std::abs(det) <= 1e-14 * std::max(1.0, nrm * nrm))
        throw std::domain_error("invert: degree-one map has singular linear part");
    DegreeOneMap inv;
    inv.b1 = phi.c2 / det;
    inv.c1 = -phi.c1 / det;
    inv.b2 = -phi.b2 / det;
    inv.c2 = phi.b1 / det;
    inv.a1 = -(inv.b1 * phi.a1 + inv.c1 * phi.a2);
    inv.a2 = -(inv.b2 * phi.a1 + inv.c2 * phi.a2);
    return inv;
}

DegreeOneMap compose(const DegreeOneMap& f, const DegreeOneMap& g) {
    DegreeOneMap h;
    h.b1 = f.b1 * g.b1 + f.c1 * g.b2;
    h.c1 = f.b1 * g.c1 + f.c1 * g.c2;
    h.a1 = f.a1 + f.b1 * g.a1 + f.c1 * g.a2;
    h.b2 = f.b2 * g.b1 + f.c2 * g.b2;
    h.c2 = f.b2 * g.c1 + f.c2 * g.c2;
    h.a2 = f.a2 + f.b2 * g.a1 + f.c2 * g.a2;
    return h;
}

Conic transform_conic(const Conic& Q, const DegreeOneMap& phi) {
    const Poly p1{{Mono{0, 0}, phi.a1}, {Mono{0, 1}, phi.b1}, {Mono{1, 0}, phi.c1}};
    const Poly p2{{Mono{0, 0}, phi.a2}, {Mono{0, 1}, phi.b2}, {Mono{1, 0}, phi.c2}};
    Poly acc;
    auto add = [&acc](const Poly& p, double w) {
        for (const auto& [m, cv] : p) poly_add_term(acc, m, w * cv);
    };
    add(poly_mul(p1, p1), Q.xx);
    add(poly_mul(p1, p2), Q.xy);
    add(poly_mul(p2, p2), Q.yy);
    add(p1, Q.x);
    add(p2, Q.y);
    poly_add_term(acc, Mono{0, 0}, Q.c);
    auto coeff = [&acc](int i, int j) {
        auto it = acc.find(Mono{i, j});
        return it == acc.end() ? 0.0 : it->second;
    };
    return Conic{coeff(0, 2), coeff(1, 1), coeff(2, 0), coeff(0, 1), coeff(1, 0),
                 coeff(0, 0)};
}

Conic canonical_conic(CanonicalCurve c) {
    return c == CanonicalCurve::yx_eq_1 ? Conic{0, 1, 0, 0, 0, -1}
                                        : Conic{0, 1, 0, 0, 0, 0};
}

namespace {

std::vector<std::pair<double, double>> canonical_sample_points(CanonicalCurve c) {
    std::vector<std::pair<double, double>> pts;
    if (c == CanonicalCurve::yx_eq_1) {
        for (double t : {0.5, 0.7, 0.9, 1.1, 1.4, 1.7, 2.0, 2.3, 2.7, 3.5}) {
            pts.emplace_back(t, 1.0 / t);
            pts.emplace_back(-t, -1.0 / t);
        }
    } else {
        for (double t : {0.6, 1.0, 1.5, 2.1, 2.8}) {
            pts.emplace_back(t, 0.0);
            pts.emplace_back(-t, 0.0);
            pts.emplace_back(0.0, t);
            pts.emplace_back(0.0, -t);
        }
    }
    return pts;
}

}  // namespace

HyperbolaNormalization normalize_hyperbola(const Conic& Q) {
    const ConicClass cls = classify(Q);
    if (cls != ConicClass::nondegenerate_hyperbola && cls != ConicClass::degenerate_hyperbola)
        throw UnsupportedCurve("normalize_hyperbola: conic is " + to_string(cls));
    const double s = Q.scale();
    const double s2 = std::max({std::abs(Q.xx), std::abs(Q.xy), std::abs(Q.yy)});

    // center of the (central) conic
    const double det2 = 4 * Q.xx * Q.yy - Q.xy * Q.xy;  // = 4 delta2, nonzero here
    const double x0 = (-Q.x * 2 * Q.yy + Q.y * Q.xy) / det2;
    const double y0 = (-Q.y * 2 * Q.xx + Q.x * Q.xy) / det2;
    const double k = Q.eval(x0, y0);

    // split the quadratic part into two linear forms l1, l2 with l1 l2 = quad
    double l1u, l1v, l2u, l2v;
    if (std::abs(Q.xx) > 1e-12 * std::max(1.0, s2)) {
        const double disc = Q.xy * Q.xy - 4 * Q.xx * Q.yy;  // > 0 for hyperbolas
        const double sq = std::sqrt(disc);
        double t1 = (-Q.xy + sq) / (2 * Q.xx);
        double t2 = (-Q.xy - sq) / (2 * Q.xx);
        if (t1 < t2) std::swap(t1, t2);
        l1u = 1.0;
        l1v = -t1;
        l2u = Q.xx;
        l2v = -Q.xx * t2;
    } else {
        l1u = Q.xy;
        l1v = Q.yy;
        l2u = 0.0;
        l2v = 1.0;
    }

    double s1, sv2, lambda;
    CanonicalCurve canonical;
    if (cls == ConicClass::nondegenerate_hyperbola) {
        const double n1 = std::hypot(l1u, l1v), n2 = std::hypot(l2u, l2v);
        s1 = std::sqrt(std::abs(k) * n1 / n2);  // balance the two scaled lines
        sv2 = -(k > 0 ? 1.0 : -1.0) * std::abs(k) / s1;
        lambda = -k;
        canonical = CanonicalCurve::yx_eq_1;
    } else {
        s1 = std::hypot(l1u, l1v);
        sv2 = std::hypot(l2u, l2v);
        lambda = s1 * sv2;
        canonical = CanonicalCurve::yx_eq_0;
    }

    // psi: original coordinates -> canonical coordinates
    DegreeOneMap psi;
    psi.b1 = l1u / s1;
    psi.c1 = l1v / s1;
    psi.a1 = -(l1u * x0 + l1v * y0) / s1;
    psi.b2 = l2u / sv2;
    psi.c2 = l2v / sv2;
    psi.a2 = -(l2u * x0 + l2v * y0) / sv2;
    if (psi.det() < 0) {  // the canonical curve is swap-symmetric; fix orientation
        std::swap(psi.a1, psi.a2);
        std::swap(psi.b1, psi.b2);
        std::swap(psi.c1, psi.c2);
    }

    HyperbolaNormalization out{invert(psi), canonical, lambda};
    for (auto [u, v] : canonical_sample_points(canonical)) {
        auto [px, py] = out.phi(u, v);
        if (std::abs(Q.eval(px, py)) > 1e-8 * s * std::max(1.0, px * px + py * py))
            throw std::runtime_error("normalize_hyperbola: verification failed");
    }
    return out;
}

MomentSequence transform_moments(const MomentSequence& beta, const DegreeOneMap& phi) {
    const int deg = beta.degree();
    const Poly p1{{Mono{0, 0}, phi.a1}, {Mono{0, 1}, phi.b1}, {Mono{1, 0}, phi.c1}};
    const Poly p2{{Mono{0, 0}, phi.a2}, {Mono{0, 1}, phi.b2}, {Mono{1, 0}, phi.c2}};
    std::vector<Poly> pow1(deg + 1), pow2(deg + 1);
    pow1[0] = Poly{{Mono{0, 0}, 1.0}};
    pow2[0] = pow1[0];
    for (int d = 1; d <= deg; ++d) {
        pow1[d] = poly_mul(pow1[d - 1], p1);
        pow2[d] = poly_mul(pow2[d - 1], p2);
    }
    MomentSequence out(deg);
    for (Mono m : monomials_upto(deg))
        out.at(m.i, m.j) = riesz(beta, poly_mul(pow2[m.i], pow1[m.j]));
    return out;
}

AtomicMeasure pushforward_measure(const AtomicMeasure& mu, const DegreeOneMap& phi) {
    AtomicMeasure out;
    out.atoms.reserve(mu.atoms.size());
    for (const Atom& a : mu.atoms) {
        auto [px, py] = phi(a.x, a.y);
        out.atoms.push_back({px, py, a.density});
    }
    return out;
}

}  // namespace hypermoment
