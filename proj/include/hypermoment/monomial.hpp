#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace hypermoment {

/// Monomial y^i x^j of the plane. The ordering is degree-lexicographic with
/// x-powers first within each total degree, i.e. the column order
/// 1, X, Y, X^2, YX, Y^2, X^3, YX^2, Y^2X, Y^3, ...
struct Mono {
    int i = 0;  ///< power of y
    int j = 0;  ///< power of x

    int degree() const { return i + j; }

    friend bool operator==(const Mono&, const Mono&) = default;
    friend bool operator<(const Mono& a, const Mono& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return a.i < b.i;
    }
};

/// Index of y^i x^j in the degree-lex monomial list.
inline int monomial_position(int i, int j) {
    int d = i + j;
    return d * (d + 1) / 2 + i;
}

inline int monomial_position(Mono m) { return monomial_position(m.i, m.j); }

/// Number of monomials of total degree <= n; the side of the level-n moment matrix.
inline int moment_matrix_size(int n) { return (n + 1) * (n + 2) / 2; }

/// Inverse of monomial_position.
inline Mono monomial_at(int position) {
    if (position < 0) throw std::out_of_range("monomial_at: negative position");
    int d = 0;
    while ((d + 1) * (d + 2) / 2 <= position) ++d;
    int i = position - d * (d + 1) / 2;
    return Mono{i, d - i};
}

/// All monomials of total degree <= n in degree-lex order.
inline std::vector<Mono> monomials_upto(int n) {
    std::vector<Mono> out;
    out.reserve(moment_matrix_size(n));
    for (int d = 0; d <= n; ++d)
        for (int i = 0; i <= d; ++i) out.push_back(Mono{i, d - i});
    return out;
}

/// Sparse real polynomial in two variables, keyed by monomial.
using Poly = std::map<Mono, double>;

inline void poly_add_term(Poly& p, Mono m, double c) {
    auto [it, inserted] = p.try_emplace(m, c);
    if (!inserted) it->second += c;
}

inline int poly_degree(const Poly& p) {
    int d = 0;
    for (const auto& [m, c] : p) d = std::max(d, m.degree());
    return d;
}

inline double poly_max_abs(const Poly& p) {
    double s = 0.0;
    for (const auto& [m, c] : p) s = std::max(s, std::abs(c));
    return s;
}

inline double poly_eval(const Poly& p, double x, double y) {
    double acc = 0.0;
    for (const auto& [m, c] : p) acc += c * std::pow(y, m.i) * std::pow(x, m.j);
    return acc;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b)
            poly_add_term(out, Mono{ma.i + mb.i, ma.j + mb.j}, ca * cb);
    return out;
}

/// Drop coefficients at numerical-noise level relative to the polynomial's scale.
inline Poly poly_trim(const Poly& p, double rel = 1e-9) {
    double sc = poly_max_abs(p);
    Poly out;
    for (const auto& [m, c] : p)
        if (std::abs(c) > rel * std::max(1.0, sc)) out.emplace(m, c);
    return out;
}

}  // namespace hypermoment
